"""Weiser's slice is sound but not always minimal.

Two small schemas where a bounded search finds a strictly smaller slice:
repeated_g keeps a redundant branch because the dependence analysis
cannot see that both g's compute the same value, and identical_parts
keeps w := h() only to feed a test whose outcome does not matter.
"""

from pathlib import Path

from schemaslice.analysis import need
from schemaslice.semantics import minimal_slices
from schemaslice.syntax import parse_file, print_schema

HERE = Path(__file__).parent / "schemas"


def show(name, var, fuel=20):
    schema = parse_file(HERE / f"{name}.sch")
    print(f"== {name}, slicing on {var}")
    print("need:", " ".join(need(schema, var)))
    report = minimal_slices(schema, var, fuel)
    print(f"weiser slice ({report.weiser_verdict.kind}):")
    print(print_schema(report.weiser), end="")
    for t in report.minimal:
        print("minimal verified slice:")
        print(print_schema(t), end="")
    print(f"({report.examined} subschemas checked up to fuel {fuel})\n")


show("repeated_g", "v")
show("identical_parts", "u")
