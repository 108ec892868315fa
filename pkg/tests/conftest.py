import numpy as np
import pytest

from ruijsenaars.shiftalg import SamplerConfig
from ruijsenaars.specialfn import BracketContext, ModelParams

DELTA = np.sqrt(2) / 10 + 1j * np.sqrt(3) / 20
KAPPA = np.sqrt(5) / 10 - 1j * np.sqrt(7) / 40
NOME = 0.3 * np.exp(0.7j)

VARIANTS = {
    "elliptic": BracketContext.elliptic(NOME),
    "trigonometric": BracketContext.trigonometric(),
    "hyperbolic": BracketContext.hyperbolic(),
    "rational": BracketContext.rational(),
}


def make_params(variant="elliptic", **kw):
    return ModelParams(kw.pop("delta", DELTA), kw.pop("kappa", KAPPA), VARIANTS[variant], **kw)


@pytest.fixture
def params():
    return make_params()


@pytest.fixture(params=list(VARIANTS))
def any_params(request):
    return make_params(request.param)


@pytest.fixture
def cfg():
    return SamplerConfig(samples=10, tol=1e-9, seed=1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
