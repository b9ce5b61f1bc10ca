"""Slicing on termination.

In special_omega the loop test reads w, which depends on both branches of
p.  Weiser's need set for termination is therefore everything, yet
deleting x := c() still preserves termination on every interpretation
the bounded search tries, and flipping p alone never changes it.
"""

from pathlib import Path

from schemaslice.analysis import need
from schemaslice.classify import check_special
from schemaslice.core import OMEGA, delete_symbols, labels
from schemaslice.semantics import check_omega_slice, find_couple
from schemaslice.syntax import parse_file, print_schema

schema = parse_file(Path(__file__).parent / "schemas" / "special_omega.sch")
print("special:", check_special(schema)[0])
print("need(ω) is everything:", set(need(schema, OMEGA).labels) == set(labels(schema)))

smaller = delete_symbols(schema, set(labels(schema)) - {"c"})
print(print_schema(smaller), end="")
print("ω-slice check at fuel 80:", check_omega_slice(schema, smaller, 80).kind)
print("p/ω couple at fuel 80:", find_couple(schema, "p", OMEGA, 80))
