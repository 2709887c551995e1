"""The acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (visible with ``pytest -s``
or in the terminal summary below).
"""

import pytest

from snalip.acceptance import CRITERIA

_LINES = []


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, len(CRITERIA) + 1)])
def test_criterion(crit):
    res = crit()
    line = res.line()
    _LINES.append(line)
    print(line)
    assert res.ok, line


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    if _LINES:
        tr = request.config.pluginmanager.get_plugin("terminalreporter")
        if tr is not None:
            tr.write_line("")
            tr.write_line("acceptance summary:")
            for line in sorted(_LINES, key=lambda s: int(s.split(".")[0].split()[-1])):
                tr.write_line(line)
