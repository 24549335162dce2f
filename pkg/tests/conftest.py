import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cutjump import corpus, reconstruct, thermal


@pytest.fixture(scope="session")
def normalized60_report():
    """Reference run: normalized_rational, N = 60, noiseless, n_max = 200."""
    spec = corpus.builtin("normalized_rational")
    cs = corpus.coefficients(spec, 60)
    return reconstruct.build_report(cs, n_max=200, truth=spec.jump)


@pytest.fixture(scope="session")
def harmonic60_report():
    spec = corpus.builtin("harmonic")
    cs = corpus.coefficients(spec, 60)
    return reconstruct.build_report(cs, n_max=200, truth=spec.jump)


@pytest.fixture(scope="session")
def thermal60_report():
    spec = corpus.builtin("thermal_boson_demo")
    problem = thermal.thermal_problem(spec, 60)
    return thermal.build_thermal_report(problem, n_max=200)


@pytest.fixture(scope="session")
def noisy7_report():
    """normalized_rational, N = 60, eps = 1e-7, seed 42, n_max = 150."""
    spec = corpus.builtin("normalized_rational")
    cs = corpus.coefficients(spec, 60, epsilon=1e-7, seed=42)
    return reconstruct.build_report(cs, n_max=150, truth=spec.jump)
