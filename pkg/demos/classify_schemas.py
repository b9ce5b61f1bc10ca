"""Which schemas are free and liberal, and why not.

Free: every syntactic path can actually be followed by some interpretation.
Liberal: no path computes the same term twice.  The decision procedure
reports a short witness segment when a schema fails the joint test.
"""

from pathlib import Path

from schemaslice.classify import classify
from schemaslice.syntax import parse_file, print_schema

HERE = Path(__file__).parent / "schemas"

for name in ["liberal_not_free", "free_not_liberal", "free_and_liberal",
             "linear_loop", "special_omega"]:
    schema = parse_file(HERE / f"{name}.sch")
    rep = classify(schema)
    print(f"== {name}")
    print(print_schema(schema), end="")
    print(f"linear={rep.linear} free_and_liberal={rep.free_and_liberal} special={rep.special}")
    if rep.witness:
        # the same predicate term tested twice, or the same term built twice
        print("witness:", rep.witness.segment)
    print()
