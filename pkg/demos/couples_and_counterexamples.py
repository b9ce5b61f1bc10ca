"""Interpretations, couples and a refuted slice on the linear loop.

An interpretation is a predicate oracle over Herbrand terms.  Flipping the
single term p(h2(u)) changes the final value of v, so p matters for v.
Deleting u := f(u) is harmless for the original loop but not for the
variant where v accumulates g2 applications.
"""

from pathlib import Path

from schemaslice.core import delete_symbols, labels
from schemaslice.semantics import check_u_slice, find_couple, run
from schemaslice.syntax import format_oracle, parse_file, parse_oracle_file, parse_pred_term

HERE = Path(__file__).parent / "schemas"

loop = parse_file(HERE / "linear_loop.sch")
i = parse_oracle_file(HERE / "linear_loop_i.oracle")
j = i.with_entry(parse_pred_term("p(h2(u))"), False)
print("under i, v =", run(loop, i, 50).final["v"])
print("under j, v =", run(loop, j, 50).final["v"])

w = find_couple(loop, "p", "v", 60)
print(f"\ncouple found on {w.term}; finals {w.outcome_i.final['v']} and {w.outcome_j.final['v']}")
print("shared head:", w.head)
print("replays:", w.replay(loop))


def without_f(schema):
    return delete_symbols(schema, set(labels(schema)) - {"f"})


print("\nlinear_loop minus u := f(u):", check_u_slice(loop, without_f(loop), "v", 60).kind)

variant = parse_file(HERE / "linear_loop_g2.sch")
cx = check_u_slice(variant, without_f(variant), "v", 60)
print("linear_loop_g2 minus u := f(u):", cx.kind)
# true branches are tried first, so the first refutation found is a long run
lines = format_oracle(cx.oracle).splitlines()
print(f"oracle with {len(cx.oracle)} entries, starting")
print("\n".join("  " + l for l in lines[:5]))
print("original v:", cx.s_outcome.final["v"])
print("sliced v:  ", cx.t_outcome.final["v"])
print("replays:", cx.replay(variant, without_f(variant)))
