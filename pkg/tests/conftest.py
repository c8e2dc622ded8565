import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from torusmirror.theta import ModuliParams  # noqa: E402

TAUS = [1j, 0.3 + 1.1j, -0.5 + 0.8j]


@pytest.fixture
def p_i():
    return ModuliParams(1j)


@pytest.fixture(params=TAUS, ids=["tau=i", "tau=0.3+1.1i", "tau=-0.5+0.8i"])
def params(request):
    return ModuliParams(request.param)


PI = math.pi


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
