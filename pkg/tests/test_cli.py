import subprocess
import sys

import pytest

from golden_runner import FIXTURES, commands, expected, render

CASES = commands()


def test_fixture_count():
    assert len(CASES) >= 20
    assert len({n for n, _ in CASES}) == len(CASES)


@pytest.mark.parametrize("name,args", CASES, ids=[n for n, _ in CASES])
def test_golden(name, args):
    first = render(args)
    assert first == expected(name)
    assert render(args) == first


def test_known_outputs():
    assert "1 - xi1*xi2\n" in expected("invert_unit")
    assert "\n-xi1*xi2\n" in expected("normalize_swap")


def test_exit_codes():
    codes = {n: expected(n).rstrip().rsplit("[exit ", 1)[1].rstrip("]") for n, _ in CASES}
    assert codes["invert_not_invertible"] == "1"
    assert codes["parse_error"] == "2"
    assert codes["missing_file"] == "2"
    assert codes["sheaf_glue_bad"] == "1"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "z2ngeom.cli", "invert", "1 + xi1*xi2"],
        capture_output=True, text=True, cwd=FIXTURES,
    )
    assert proc.returncode == 0
    assert proc.stdout == "1 - xi1*xi2\n"


def test_bad_flag_is_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "z2ngeom.cli", "normalize", "x", "--format", "json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
