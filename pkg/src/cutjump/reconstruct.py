"""Jump-function reconstruction from power-series coefficients.

Pipeline: synthesize expansion coefficients c_n from the series data in
extended precision (the alternating sum over k cancels catastrophically, so
double precision is never attempted), locate the plateau of the partial
energies M_m, truncate there, and resum the Laguerre-type basis on a sample
grid.  Independent integral checks (Mellin, Cauchy, probability density) let
callers validate a reconstruction without knowing the truth.

Sign convention: the expansion coefficients and basis functions each carry a
phase i^n; their product is real, equal to (-1)^n times the rotated real
recurrence output.  That (-1)^n is folded into the stored c_n, so every
reported coefficient and sample is a plain float and the reconstruction is
simply sum_n c_n * basis_phi(n, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from mpmath import mp

from .corpus import CoefficientSet, JumpGroundTruth
from .errors import ConfigError, DomainError, InputError
from .specfun import integrate_adaptive, laguerre_scaled_seq, rotated_seq_raw

__all__ = [
    "ErrorReport",
    "PlateauPolicy",
    "PlateauResult",
    "ReconstructionReport",
    "SynthesisResult",
    "basis_phi",
    "build_report",
    "cauchy_check",
    "default_grid",
    "density_check",
    "detect_plateau",
    "expansion_fn",
    "l2_error",
    "mellin_of_reconstruction",
    "partial_energies",
    "phi_matrix",
    "reconstruct_jump",
    "synthesize_coefficients",
]

DEFAULT_PRECISION_BITS = 320
DEFAULT_N_MAX = 200
STABILIZATION_RTOL = 1e-12
NEGLIGIBLE_COEFF = 1e-300


# --------------------------------------------------------------------------
# Coefficient synthesis
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized expansion coefficients plus precision bookkeeping."""

    c: np.ndarray
    precision_used: int
    stabilized: bool


_PREFACTORS = {
    "sqrt2": lambda: mp.sqrt(2),
    "two_sqrt_pi": lambda: 2 * mp.sqrt(mp.pi),
}


def _synth_raw(values: np.ndarray, n_max: int, precision: int, prefactor: str) -> list:
    """s_n = prefactor * sum_k (-1)^k v_k q_n^{(k)} / k! as mpmath floats.

    q_n is the rotated Meixner-Pollaczek value (see specfun.rotated_seq_raw);
    the sum runs over the ordinal position k of ``values``.  The prefactor is
    evaluated at working precision.
    """
    with mp.workprec(precision):
        pref = _PREFACTORS[prefactor]()
        s = [mp.mpf(0)] * (n_max + 1)
        coeff = mp.mpf(1)  # (-1)^k / k!
        for k, v in enumerate(values):
            if k > 0:
                coeff = -coeff / k
            a = coeff * mp.mpf(float(v))
            if a == 0:
                continue
            qq = rotated_seq_raw(n_max, k, precision)
            for n in range(n_max + 1):
                s[n] += a * qq[n]
        return [pref * x for x in s]


def synthesize_raw(
    values: np.ndarray,
    n_max: int,
    precision0: int = DEFAULT_PRECISION_BITS,
    escalation_budget: int = 4,
    prefactor: str = "sqrt2",
    alternate_sign: bool = True,
) -> SynthesisResult:
    """Extended-precision synthesis with precision escalation.

    Recomputes at doubled precision until every coefficient above the
    negligibility floor agrees to relative 1e-12 between consecutive
    precisions.  ``alternate_sign`` applies the (-1)^n phase-product factor
    (on for the reconstruction coefficients, off for the raw rotated sums
    used by the critical-line expansion).
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InputError("synthesis input must be a non-empty 1-D array")
    if not np.all(np.isfinite(values)):
        raise InputError("synthesis input must not contain NaN or Inf")
    if n_max < 0:
        raise InputError("n_max must be >= 0")
    if precision0 < 64:
        raise ConfigError(f"precision0: {precision0} bits is below the 64-bit minimum")
    if escalation_budget < 0:
        raise ConfigError("escalation_budget: must be >= 0")

    def finish(raw, prec, ok):
        c = np.array([float(x) for x in raw])
        if alternate_sign and n_max >= 1:
            c[1::2] = -c[1::2]
        return SynthesisResult(c=c, precision_used=prec, stabilized=ok)

    prec = precision0
    prev = _synth_raw(values, n_max, prec, prefactor)
    if escalation_budget == 0:
        # A single computation cannot be cross-checked; flag it.
        return finish(prev, prec, False)
    for _ in range(escalation_budget):
        prec2 = prec * 2
        cur = _synth_raw(values, n_max, prec2, prefactor)
        with mp.workprec(prec2):
            agree = all(
                abs(a - b) <= STABILIZATION_RTOL * abs(b)
                for a, b in zip(prev, cur)
                if abs(b) > NEGLIGIBLE_COEFF or abs(a) > NEGLIGIBLE_COEFF
            )
        if agree:
            return finish(cur, prec2, True)
        prev, prec = cur, prec2
    return finish(prev, prec, False)


def synthesize_coefficients(
    g: CoefficientSet | np.ndarray,
    n_max: int = DEFAULT_N_MAX,
    precision0: int = DEFAULT_PRECISION_BITS,
    escalation_budget: int = 4,
) -> SynthesisResult:
    """Expansion coefficients c_0..c_{n_max} from series coefficients.

    c_n = (-1)^n sqrt(2) sum_{k=0}^{N} (-1)^k g_k q_n^{(k)} / k!, the real
    number such that the reconstruction is sum c_n basis_phi(n, x).
    """
    values = g.values if isinstance(g, CoefficientSet) else np.asarray(g, dtype=float)
    return synthesize_raw(
        values,
        n_max,
        precision0=precision0,
        escalation_budget=escalation_budget,
        prefactor="sqrt2",
        alternate_sign=True,
    )


def partial_energies(c: np.ndarray) -> np.ndarray:
    """Cumulative energies M_m = sum_{n<=m} c_n^2 (nondecreasing)."""
    c = np.asarray(c, dtype=float)
    return np.cumsum(c * c)


# --------------------------------------------------------------------------
# Plateau detection
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlateauPolicy:
    """Parameters of the truncation-point search.

    heuristic mode: flag runs of relative energy growth below ``theta``
    lasting at least ``w_min`` steps; truncate half a window inside the end
    of the longest run.  known_energy mode: truncate at the last m with
    M_m <= known_K.  ``band_lo``/``band_hi`` define the reported plateau
    extent as the m-range where M stays within (-band_lo, +band_hi)
    relative to the energy level at the truncation point.
    """

    mode: str = "heuristic"
    theta: float = 1e-3
    w_min: int = 5
    delta: float = 1e-30
    known_K: float | None = None
    band_lo: float = 0.04
    band_hi: float = 0.15
    min_decay_exponent: float = 2.0
    divergence_growth: float = 0.5

    def __post_init__(self):
        if self.mode not in ("heuristic", "known_energy"):
            raise ConfigError(f"mode: unknown plateau mode {self.mode!r}")
        if not self.theta > 0.0:
            raise ConfigError("theta: must be > 0")
        if self.w_min < 2:
            raise ConfigError("w_min: must be >= 2")
        if not self.delta > 0.0:
            raise ConfigError("delta: must be > 0")
        if self.mode == "known_energy" and (self.known_K is None or self.known_K <= 0.0):
            raise ConfigError("known_K: known_energy mode needs a positive energy")
        if not (0.0 < self.band_lo < 1.0) or self.band_hi <= 0.0:
            raise ConfigError("band_lo/band_hi: must be positive (band_lo < 1)")
        if self.divergence_growth <= self.theta:
            raise ConfigError("divergence_growth: must exceed theta")


@dataclass(frozen=True)
class PlateauResult:
    """Detected plateau band, truncation index, and confidence."""

    plateau: tuple[int, int] | None
    m_t: int
    confident: bool
    has_run: bool
    run: tuple[int, int] | None
    level: float
    decay_exponent: float


def _flat_runs(growth: np.ndarray, theta: float) -> list[tuple[int, int]]:
    runs = []
    start = None
    for m, flat in enumerate(growth <= theta):
        if flat and start is None:
            start = m
        if not flat and start is not None:
            runs.append((start, m))
            start = None
    if start is not None:
        runs.append((start, len(growth)))
    return runs


def _energy_decay_exponent(c_sq: np.ndarray, lo: int, hi: int) -> float:
    """Log-log slope of the |c_n|^2 envelope over [lo, hi].

    Bins of five indices with a max inside each bin, so isolated
    near-zero coefficients (the expansion oscillates through zero) do not
    drag the fit.  Returns the decay exponent p in c^2 ~ m^-p.
    """
    if hi - lo < 4:
        return 0.0
    idx = np.arange(lo, hi + 1)
    seg = c_sq[lo : hi + 1]
    n_bins = max(3, len(seg) // 5)
    mids, tops = [], []
    for chunk_i, chunk_m in zip(np.array_split(seg, n_bins), np.array_split(idx, n_bins)):
        top = chunk_i.max()
        if top > 0.0:
            tops.append(top)
            mids.append(chunk_m.mean())
    if len(tops) < 3:
        return 0.0
    slope = np.polyfit(np.log(mids), np.log(tops), 1)[0]
    return float(-slope)


def _band(M: np.ndarray, m_t: int, policy: PlateauPolicy) -> tuple[int, int]:
    level = float(M[m_t])
    lo_thr = (1.0 - policy.band_lo) * level
    hi_thr = (1.0 + policy.band_hi) * level
    a = int(np.searchsorted(M, lo_thr, side="left"))
    b = int(np.searchsorted(M, hi_thr, side="right")) - 1
    return a, min(max(b, m_t), len(M) - 1)


def detect_plateau(M: Sequence[float], policy: PlateauPolicy | None = None) -> PlateauResult:
    """Locate the plateau of the partial energies and pick a truncation index.

    Heuristic mode anchors on the longest run of relative growth
    (M_{m+1}-M_m)/max(M_m, delta) <= theta with length >= w_min (ties broken
    toward the later run) and truncates w_min//2 + 1 steps inside its end,
    where the expansion is most converged but not yet edge-contaminated.
    Without a qualifying run the flattest w_min-step window is used and the
    result is flagged unconfident.  The reported plateau is the band where M
    stays within (-band_lo, +band_hi) of the truncation level; on a plot of
    M against m that band is exactly the stretch that looks flat.

    Confidence additionally requires the energy increments over the run to
    decay at least like m^-2; slower decay is the signature of a
    discontinuous jump function, whose truncated expansion cannot be
    trusted pointwise.
    """
    if policy is None:
        policy = PlateauPolicy()
    M = np.asarray(M, dtype=float)
    if M.ndim != 1 or M.size == 0:
        raise InputError("partial energies must be a non-empty 1-D array")
    if M.size == 1:
        return PlateauResult((0, 0), 0, False, False, None, float(M[0]), 0.0)
    if np.any(np.diff(M) < 0.0):
        raise InputError("partial energies must be nondecreasing")

    if policy.mode == "known_energy":
        below = np.nonzero(M <= policy.known_K)[0]
        if below.size == 0:
            return PlateauResult(_band(M, 0, policy), 0, False, False, None, float(M[0]), 0.0)
        m_t = int(below[-1])
        return PlateauResult(_band(M, m_t, policy), m_t, True, False, None, float(M[m_t]), 0.0)

    growth = np.diff(M) / np.maximum(M[:-1], policy.delta)
    # Indices at or beyond the first divergence jump are off limits: once a
    # single step multiplies the energy, any later "flat" stretch is a shelf
    # on top of the blow-up, not a plateau of the converged energy.
    diverged = np.nonzero(growth >= policy.divergence_growth)[0]
    guard = int(diverged[0]) if diverged.size and diverged[0] > 0 else growth.size
    qualifying = [
        r
        for r in _flat_runs(growth, policy.theta)
        if r[1] - r[0] >= policy.w_min and r[0] < guard
    ]
    c_sq = np.diff(M, prepend=0.0)

    if qualifying:
        a0, b0 = max(qualifying, key=lambda r: (r[1] - r[0], r[0]))
        m_t = max(a0, min(b0 - (policy.w_min + 1) // 2, M.size - 1))
        fit_hi = min(m_t, max(a0 + 2 * policy.w_min, (a0 + m_t) // 2))
        p_hat = _energy_decay_exponent(c_sq, a0, fit_hi)
        confident = p_hat >= policy.min_decay_exponent
        return PlateauResult(_band(M, m_t, policy), m_t, confident, True, (a0, b0), float(M[m_t]), p_hat)

    # No qualifying run: fall back to the flattest smoothed window before
    # the divergence guard.
    w = min(policy.w_min, growth.size)
    smoothed = np.convolve(growth, np.ones(w) / w, mode="valid")
    hi = max(1, min(smoothed.size, guard))
    seg = smoothed[:hi]
    m_t = int(seg.size - 1 - np.argmin(seg[::-1]))  # ties -> later
    p_hat = _energy_decay_exponent(c_sq, max(0, m_t - 2 * policy.w_min), m_t)
    return PlateauResult(_band(M, m_t, policy), m_t, False, False, None, float(M[m_t]), p_hat)


# --------------------------------------------------------------------------
# Basis evaluation and resummation
# --------------------------------------------------------------------------


def phi_matrix(n_max: int, xs) -> np.ndarray:
    """Basis magnitudes phi_n(x) = sqrt(2) L_n(2/x) e^{-1/x} / x, all n <= n_max.

    Shape (n_max + 1, len(xs)).  The i^n phase of the analytic basis is the
    one already folded into the synthesized coefficients.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0.0):
        raise DomainError("basis arguments must satisfy x > 0")
    return math.sqrt(2.0) * laguerre_scaled_seq(n_max, 2.0 / xs) / xs


def basis_phi(n: int, x) -> float | np.ndarray:
    """Single basis magnitude phi_n(x); see ``phi_matrix``."""
    if n < 0:
        raise InputError("basis index must be >= 0")
    scalar = np.isscalar(x)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = phi_matrix(n, xs)[n]
    return float(out[0]) if scalar else out


def default_grid() -> np.ndarray:
    """Default sample grid: 1500 geometric points on [1e-2, 50] plus 500
    linear points on [0.5, 3] where the jump's structure lives."""
    return np.unique(
        np.concatenate([np.geomspace(1e-2, 50.0, 1500), np.linspace(0.5, 3.0, 500)])
    )


def reconstruct_jump(c: np.ndarray, m_t: int, xs) -> np.ndarray:
    """Truncated expansion sum_{n<=m_t} c_n phi_n(x) on the grid ``xs``."""
    c = np.asarray(c, dtype=float)
    if not 0 <= m_t < c.size:
        raise InputError(f"m_t = {m_t} outside the available 0..{c.size - 1}")
    return c[: m_t + 1] @ phi_matrix(m_t, xs)


def expansion_fn(c: np.ndarray, m_t: int) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized callable x -> truncated expansion, for the integral checks."""
    c = np.asarray(c, dtype=float)
    if not 0 <= m_t < c.size:
        raise InputError(f"m_t = {m_t} outside the available 0..{c.size - 1}")
    head = c[: m_t + 1]

    def j(x):
        return head @ phi_matrix(m_t, np.atleast_1d(np.asarray(x, dtype=float)))

    return j


# --------------------------------------------------------------------------
# Error metrics and integral checks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorReport:
    l2_abs: float
    l2_rel: float | None
    domain: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "l2_abs": self.l2_abs,
            "l2_rel": self.l2_rel,
            "domain": [self.domain[0], self.domain[1]],
        }


def l2_error(
    xs: np.ndarray,
    j_rec: np.ndarray,
    truth: Callable,
    domain: tuple[float, float] = (1.0, 50.0),
) -> ErrorReport:
    """Composite-trapezoid L^2 error of sampled values against the truth.

    The rule integrates |J_rec - J_true|^2 over the sample abscissae inside
    ``domain``; the grid must already resolve both curves there.  The
    relative form divides by the truth's norm on the same domain; a
    zero-norm truth reports the absolute error only.
    """
    xs = np.asarray(xs, dtype=float)
    j_rec = np.asarray(j_rec, dtype=float)
    lo, hi = domain
    mask = (xs >= lo) & (xs <= hi)
    if mask.sum() < 8:
        raise InputError("sample grid too sparse on the error domain")
    x = xs[mask]
    jt = np.asarray(truth(x), dtype=float)
    err_sq = float(np.trapezoid((j_rec[mask] - jt) ** 2, x))
    norm_sq = float(np.trapezoid(jt**2, x))
    l2_abs = math.sqrt(max(err_sq, 0.0))
    l2_rel = math.sqrt(err_sq / norm_sq) if norm_sq > 0.0 else None
    return ErrorReport(l2_abs=l2_abs, l2_rel=l2_rel, domain=(lo, hi))


_CHECK_TOL = dict(abs_tol=1e-9, rel_tol=1e-9, max_intervals=4000)


def mellin_of_reconstruction(j: Callable, lam: float) -> float:
    """int_1^inf j(x) x^{-lambda-1} dx; at lambda = k this should return g_k."""
    if lam <= -0.5:
        raise DomainError("the transform needs lambda > -1/2")
    res = integrate_adaptive(lambda x: j(x) * x ** (-lam - 1.0), 1.0, math.inf, **_CHECK_TOL)
    return res.value


def cauchy_check(j: Callable, z: complex) -> complex:
    """int_1^inf j(x)/(x - z) dx for |z| < 1.

    For a faithful jump function this equals the power series sum g_k z^k,
    term by term through the Mellin identity.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("cauchy_check needs |z| < 1")

    def re_part(x):
        d = (x - z.real) ** 2 + z.imag**2
        return j(x) * (x - z.real) / d

    real = integrate_adaptive(re_part, 1.0, math.inf, **_CHECK_TOL).value
    if z.imag == 0.0:
        return complex(real, 0.0)

    def im_part(x):
        d = (x - z.real) ** 2 + z.imag**2
        return j(x) * z.imag / d

    imag = integrate_adaptive(im_part, 1.0, math.inf, **_CHECK_TOL).value
    return complex(real, imag)


@dataclass(frozen=True)
class DensityReport:
    integral_of_j_over_x: float
    min_value: float


def density_check(j: Callable, xs: np.ndarray | None = None) -> DensityReport:
    """Probability-density diagnostics of j: int_1^inf j(x)/x dx and min j.

    For a normalized problem the integral should be 1 and the minimum not
    appreciably negative (up to reconstruction ripple).
    """
    res = integrate_adaptive(lambda x: j(x) / x, 1.0, math.inf, **_CHECK_TOL)
    if xs is None:
        grid = default_grid()
        xs = grid[grid >= 1.0]
    vals = j(np.asarray(xs, dtype=float))
    return DensityReport(integral_of_j_over_x=res.value, min_value=float(np.min(vals)))


# --------------------------------------------------------------------------
# End-to-end report
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReconstructionReport:
    """Everything one run produces, JSON-ready via ``to_dict``."""

    c: np.ndarray
    M: np.ndarray
    plateau: tuple[int, int] | None
    m_t: int
    confident: bool
    stabilized: bool
    precision_used: int
    xs: np.ndarray
    j_rec: np.ndarray
    j_true: np.ndarray | None = None
    errors: ErrorReport | None = None
    source: str = ""
    decay_exponent: float = 0.0

    def to_dict(self) -> dict:
        samples = [
            [float(x), float(j)] if self.j_true is None else [float(x), float(j), float(t)]
            for x, j, t in zip(
                self.xs,
                self.j_rec,
                self.j_true if self.j_true is not None else np.zeros_like(self.j_rec),
            )
        ]
        return {
            "source": self.source,
            "c": [float(v) for v in self.c],
            "M": [float(v) for v in self.M],
            "plateau": list(self.plateau) if self.plateau is not None else None,
            "m_t": self.m_t,
            "confident": self.confident,
            "decay_exponent": self.decay_exponent,
            "stabilized": self.stabilized,
            "precision_used": self.precision_used,
            "samples": samples,
            "errors": self.errors.to_dict() if self.errors is not None else None,
        }


def build_report(
    g: CoefficientSet,
    n_max: int = DEFAULT_N_MAX,
    precision0: int = DEFAULT_PRECISION_BITS,
    policy: PlateauPolicy | None = None,
    grid: np.ndarray | None = None,
    truth: JumpGroundTruth | None = None,
    error_domain: tuple[float, float] = (1.0, 50.0),
    escalation_budget: int = 4,
) -> ReconstructionReport:
    """Run the full pipeline on a coefficient set."""
    synth = synthesize_coefficients(
        g, n_max=n_max, precision0=precision0, escalation_budget=escalation_budget
    )
    M = partial_energies(synth.c)
    det = detect_plateau(M, policy)
    confident = det.confident and g.values.size >= 2  # single-coefficient runs are degenerate
    xs = default_grid() if grid is None else np.asarray(grid, dtype=float)
    j_rec = reconstruct_jump(synth.c, det.m_t, xs)
    j_true = None
    errors = None
    if truth is not None:
        j_true = truth(xs)
        errors = l2_error(xs, j_rec, truth, domain=error_domain)
    return ReconstructionReport(
        c=synth.c,
        M=M,
        plateau=det.plateau,
        m_t=det.m_t,
        confident=confident,
        stabilized=synth.stabilized,
        precision_used=synth.precision_used,
        xs=xs,
        j_rec=j_rec,
        j_true=j_true,
        errors=errors,
        source=g.source,
        decay_exponent=det.decay_exponent,
    )
