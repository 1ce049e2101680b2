import numpy as np
import pytest

from gaussht import (
    DiscriminationProblem,
    GaussianStateSpec,
    make_displacement,
    make_trig_symbol,
)


def make_problem(coeffs1, coeffs2, kappa=0.5, dim=1, y1=None, y2=None):
    """Build a discrimination problem from coefficient dicts (or constants)."""
    if not isinstance(coeffs1, dict):
        coeffs1 = {(0,) * dim: coeffs1}
    if not isinstance(coeffs2, dict):
        coeffs2 = {(0,) * dim: coeffs2}
    return DiscriminationProblem(
        state1=GaussianStateSpec(
            symbol=make_trig_symbol(dim, coeffs1),
            displacement=make_displacement(dim, y1),
            kappa=kappa,
        ),
        state2=GaussianStateSpec(
            symbol=make_trig_symbol(dim, coeffs2),
            displacement=make_displacement(dim, y2),
            kappa=kappa,
        ),
    )


def random_hermitian(rng, n, scale=1.0):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (m + m.conj().T)


def random_psd_contraction(rng, n, top=0.9):
    """Random PSD matrix with norm at most ``top`` (< 1)."""
    m = random_hermitian(rng, n)
    vals, vecs = np.linalg.eigh(m)
    vals = top * (vals - vals.min()) / (vals.max() - vals.min() + 1e-12)
    return (vecs * vals) @ vecs.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
