import sys
from pathlib import Path

from schemaslice.syntax import parse_file

ROOT = Path(__file__).resolve().parent.parent
SCHEMAS = ROOT / "demos" / "schemas"

sys.path.insert(0, str(Path(__file__).resolve().parent))

# filled in by test_acceptance, printed at the end of the run
ACCEPTANCE: dict = {}


def load(name: str):
    return parse_file(SCHEMAS / f"{name}.sch")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
