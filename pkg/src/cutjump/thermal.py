"""Thermal (imaginary-time to real-time) reconstruction, boson sector.

The input is the positive-frequency half of a boson Matsubara-type Fourier
coefficient sequence, indexed from k = 1.  The machinery is the power-series
synthesis applied to the shifted sequence h_k = g_{k+1}; the basis lives in
the logarithmic variable v = ln x, convergence holds in L^2 with weight
e^{-v}, and the period is fixed at 2*pi by the standard rescaling of the
imaginary-time variable (general periods are a relabeling left to callers).

The negative-frequency branch is the mirror image v -> -v of this one and is
exposed only as a reflection wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import CoefficientSet, JumpGroundTruth, ProblemSpec, coefficients
from .errors import DomainError, InputError
from .reconstruct import (
    DEFAULT_N_MAX,
    DEFAULT_PRECISION_BITS,
    ErrorReport,
    PlateauPolicy,
    SynthesisResult,
    detect_plateau,
    partial_energies,
    synthesize_raw,
)
from .specfun import laguerre_scaled_seq, ln_gamma_complex, mp_real_seq

__all__ = [
    "ThermalProblem",
    "ThermalReport",
    "basis_psi_big",
    "build_thermal_report",
    "default_v_grid",
    "gtilde_line_expansion",
    "negative_branch",
    "psi_matrix",
    "reconstruct_thermal",
    "synthesize_line_coefficients",
    "synthesize_thermal",
    "thermal_problem",
    "weighted_l2_error",
]

BETA = 2.0 * math.pi  # fixed period after rescaling
DEFAULT_V_MAX = 15.0  # e^{-v} |J|^2 below 1e-12 beyond this for all corpus truths


@dataclass(frozen=True)
class ThermalProblem:
    """Thermal reconstruction input: coefficients g_1..g_N plus optional truth."""

    coefficients: CoefficientSet
    truth: JumpGroundTruth | None = None
    beta: float = BETA

    def __post_init__(self):
        if self.coefficients.start_index != 1:
            raise InputError("thermal coefficient sets must start at index 1")
        if self.beta != BETA:
            raise InputError("the period is fixed at 2*pi; rescale the variable instead")


def thermal_problem(
    spec: ProblemSpec, N: int, epsilon: float = 0.0, seed: int | None = None
) -> ThermalProblem:
    """Assemble a ThermalProblem from a thermal corpus spec."""
    if spec.start_index != 1:
        raise InputError(f"{spec.id} is not a thermal problem")
    return ThermalProblem(coefficients=coefficients(spec, N, epsilon, seed), truth=spec.jump)


def synthesize_thermal(
    problem: ThermalProblem,
    n_max: int = DEFAULT_N_MAX,
    precision0: int = DEFAULT_PRECISION_BITS,
    escalation_budget: int = 4,
) -> SynthesisResult:
    """Expansion coefficients from the shifted sequence h_k = g_{k+1}.

    Identical to the power-series synthesis applied to h; the stored values
    follow the same real phase-product convention.
    """
    return synthesize_raw(
        problem.coefficients.values,
        n_max,
        precision0=precision0,
        escalation_budget=escalation_budget,
        prefactor="sqrt2",
        alternate_sign=True,
    )


def psi_matrix(n_max: int, vs) -> np.ndarray:
    """Basis magnitudes sqrt(2) L_n(2 e^{-v}) e^{-e^{-v}} e^{-v/2}, all n <= n_max.

    Equals e^{-v/2} phi_n(e^v): the same Laguerre family read through
    x = e^v.  Valid for every real v.
    """
    vs = np.asarray(vs, dtype=float)
    t = 2.0 * np.exp(-vs)
    return math.sqrt(2.0) * laguerre_scaled_seq(n_max, t) * np.exp(-vs / 2.0)


def basis_psi_big(n: int, v) -> float | np.ndarray:
    """Single basis magnitude; see ``psi_matrix``."""
    if n < 0:
        raise InputError("basis index must be >= 0")
    scalar = np.isscalar(v)
    vs = np.atleast_1d(np.asarray(v, dtype=float))
    out = psi_matrix(n, vs)[n]
    return float(out[0]) if scalar else out


def default_v_grid(v_max: float = DEFAULT_V_MAX, n_points: int = 1200) -> np.ndarray:
    return np.linspace(0.0, v_max, n_points)


def reconstruct_thermal(frak_c: np.ndarray, m_t: int, vs) -> np.ndarray:
    """Truncated thermal reconstruction e^{v/2} sum_{n<=m_t} c_n psi_n(v).

    The e^{v/2} prefactor cancels the basis damping analytically, so the
    implementation sums sqrt(2) c_n L_n(2 e^{-v}) e^{-e^{-v}} directly and
    stays finite for arbitrarily large v.
    """
    frak_c = np.asarray(frak_c, dtype=float)
    if not 0 <= m_t < frak_c.size:
        raise InputError(f"m_t = {m_t} outside the available 0..{frak_c.size - 1}")
    vs = np.asarray(vs, dtype=float)
    t = 2.0 * np.exp(-vs)
    table = math.sqrt(2.0) * laguerre_scaled_seq(m_t, t)
    return frak_c[: m_t + 1] @ table


def weighted_l2_error(
    vs: np.ndarray,
    j_rec: np.ndarray,
    truth,
    v_max: float = DEFAULT_V_MAX,
) -> ErrorReport:
    """L^2 error with weight e^{-v} over [0, v_max] by composite trapezoid."""
    vs = np.asarray(vs, dtype=float)
    j_rec = np.asarray(j_rec, dtype=float)
    mask = (vs >= 0.0) & (vs <= v_max)
    if mask.sum() < 8:
        raise InputError("sample grid too sparse on [0, v_max]")
    v = vs[mask]
    w = np.exp(-v)
    jt = np.asarray(truth(v), dtype=float)
    err_sq = float(np.trapezoid(w * (j_rec[mask] - jt) ** 2, v))
    norm_sq = float(np.trapezoid(w * jt**2, v))
    l2_abs = math.sqrt(max(err_sq, 0.0))
    l2_rel = math.sqrt(err_sq / norm_sq) if norm_sq > 0.0 else None
    return ErrorReport(l2_abs=l2_abs, l2_rel=l2_rel, domain=(0.0, v_max))


def synthesize_line_coefficients(
    problem: ThermalProblem,
    n_max: int = DEFAULT_N_MAX,
    precision0: int = DEFAULT_PRECISION_BITS,
    escalation_budget: int = 4,
) -> SynthesisResult:
    """Coefficients of the critical-line expansion of the interpolant.

    Same rotated sums as the reconstruction coefficients but with prefactor
    2 sqrt(pi) and without the (-1)^n phase product: these multiply the
    complex line functions, where the i^n phase is applied explicitly at
    evaluation time.  Their ratio to the reconstruction coefficients is
    (-1)^n sqrt(2 pi); a regression test records that observation.
    """
    return synthesize_raw(
        problem.coefficients.values,
        n_max,
        precision0=precision0,
        escalation_budget=escalation_budget,
        prefactor="two_sqrt_pi",
        alternate_sign=False,
    )


def gtilde_line_expansion(d_hat: np.ndarray, m_t: int, nus) -> np.ndarray:
    """Samples of the interpolant on the line Re(lambda) = 1/2.

    Evaluates (1/sqrt(pi)) Gamma(1/2 + i nu) sum_{n<=m_t} i^n d_n P_n(nu)
    with the real d_n from ``synthesize_line_coefficients``.  For real input
    coefficients the result satisfies f(-nu) = conj(f(nu)), and |f| decays
    as nu -> +-inf.
    """
    d_hat = np.asarray(d_hat, dtype=float)
    if not 0 <= m_t < d_hat.size:
        raise InputError(f"m_t = {m_t} outside the available 0..{d_hat.size - 1}")
    nus = np.atleast_1d(np.asarray(nus, dtype=float))
    P = mp_real_seq(m_t, nus)
    phases = 1j ** np.arange(m_t + 1)
    series = (d_hat[: m_t + 1] * phases) @ P
    gamma_vals = np.array([np.exp(ln_gamma_complex(complex(0.5, nu))) for nu in nus])
    return gamma_vals * series / math.sqrt(math.pi)


def negative_branch(vs: np.ndarray, j_rec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mirror a positive-branch reconstruction onto the negative-frequency one.

    The negative branch is the verbatim reflection v -> -v of the positive
    one, so no separate pipeline exists.
    """
    vs = np.asarray(vs, dtype=float)
    order = np.argsort(-vs)
    return -vs[order], np.asarray(j_rec, dtype=float)[order]


@dataclass(frozen=True)
class ThermalReport:
    """Thermal pipeline output, JSON-ready via ``to_dict``."""

    frak_c: np.ndarray
    M: np.ndarray
    plateau: tuple[int, int] | None
    m_t: int
    confident: bool
    stabilized: bool
    precision_used: int
    vs: np.ndarray
    j_rec: np.ndarray
    j_true: np.ndarray | None = None
    weighted_errors: ErrorReport | None = None
    source: str = ""
    decay_exponent: float = 0.0

    def to_dict(self) -> dict:
        samples = [
            [float(v), float(j)] if self.j_true is None else [float(v), float(j), float(t)]
            for v, j, t in zip(
                self.vs,
                self.j_rec,
                self.j_true if self.j_true is not None else np.zeros_like(self.j_rec),
            )
        ]
        return {
            "source": self.source,
            "frak_c": [float(v) for v in self.frak_c],
            "M": [float(v) for v in self.M],
            "plateau": list(self.plateau) if self.plateau is not None else None,
            "m_t": self.m_t,
            "confident": self.confident,
            "decay_exponent": self.decay_exponent,
            "stabilized": self.stabilized,
            "precision_used": self.precision_used,
            "samples": samples,
            "weighted_errors": self.weighted_errors.to_dict() if self.weighted_errors else None,
        }


def build_thermal_report(
    problem: ThermalProblem,
    n_max: int = DEFAULT_N_MAX,
    precision0: int = DEFAULT_PRECISION_BITS,
    policy: PlateauPolicy | None = None,
    grid: np.ndarray | None = None,
    v_max: float = DEFAULT_V_MAX,
    escalation_budget: int = 4,
) -> ThermalReport:
    """Run the full thermal pipeline on a problem."""
    synth = synthesize_thermal(
        problem, n_max=n_max, precision0=precision0, escalation_budget=escalation_budget
    )
    M = partial_energies(synth.c)
    det = detect_plateau(M, policy)
    confident = det.confident and problem.coefficients.values.size >= 2
    vs = default_v_grid(v_max) if grid is None else np.asarray(grid, dtype=float)
    if np.any(vs < 0.0):
        raise DomainError("thermal reconstruction grids live on v >= 0")
    j_rec = reconstruct_thermal(synth.c, det.m_t, vs)
    j_true = None
    errors = None
    if problem.truth is not None:
        j_true = problem.truth(vs)
        errors = weighted_l2_error(vs, j_rec, problem.truth, v_max=v_max)
    return ThermalReport(
        frak_c=synth.c,
        M=M,
        plateau=det.plateau,
        m_t=det.m_t,
        confident=confident,
        stabilized=synth.stabilized,
        precision_used=synth.precision_used,
        vs=vs,
        j_rec=j_rec,
        j_true=j_true,
        weighted_errors=errors,
        source=problem.coefficients.source,
        decay_exponent=det.decay_exponent,
    )
