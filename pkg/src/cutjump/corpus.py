"""Built-in test problems, noise injection, and coefficient file I/O.

Each built-in problem bundles a closed-form coefficient rule g_k, the
closed-form interpolant g~(lambda) that restricts to those coefficients on
the integers, and (where known) the exact jump function the reconstruction
should recover.  The closed forms were derived by hand once; the test suite
re-derives every one of them by quadrature so a transcription slip cannot
survive unnoticed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, InputError, ParseError

__all__ = [
    "BUILTIN_IDS",
    "CoefficientSet",
    "JumpGroundTruth",
    "ProblemSpec",
    "add_noise",
    "builtin",
    "coefficients",
    "gtilde_eval",
    "load_coefficients",
    "load_thermal_coefficients",
    "save_coefficients",
]


@dataclass(frozen=True)
class JumpGroundTruth:
    """Closed-form jump function with its support.

    ``variable`` is "x" for jumps on [1, inf) (power-series cut) and "v" for
    jumps on [0, inf) (thermal, logarithmic variable).  Evaluation returns 0
    outside the support.
    """

    formula: Callable[[np.ndarray], np.ndarray]
    support_lo: float
    variable: str
    continuous: bool

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = x >= self.support_lo
        out = np.zeros_like(x)
        if np.any(inside):
            out[inside] = self.formula(x[inside])
        return out


@dataclass(frozen=True)
class ProblemSpec:
    """A fully specified test problem.

    ``start_index`` is 0 for power-series problems and 1 for thermal ones
    (whose coefficient sequence has no k = 0 entry).  ``jump_norm_sq`` is the
    squared reconstruction-space norm of the jump (L^2(1, inf) for power
    problems, e^{-v}-weighted L^2(0, inf) for thermal ones); it doubles as
    the known energy constant for plateau detection.
    """

    id: str
    coefficient_rule: Callable[[int], float]
    exact_rule: Callable[[int], Fraction]
    gtilde: Callable[[complex], complex]
    gtilde_half_plane: float
    jump: JumpGroundTruth | None
    continuous: bool
    normalization: float | None
    start_index: int
    jump_norm_sq: float | None


def _normalized_rational() -> ProblemSpec:
    return ProblemSpec(
        id="normalized_rational",
        coefficient_rule=lambda k: 6.0 / ((k + 2) * (k + 3)),
        exact_rule=lambda k: Fraction(6, (k + 2) * (k + 3)),
        gtilde=lambda lam: 6.0 / ((lam + 2.0) * (lam + 3.0)),
        gtilde_half_plane=-0.5,
        jump=JumpGroundTruth(
            formula=lambda x: 6.0 * (x**-2.0 - x**-3.0),
            support_lo=1.0,
            variable="x",
            continuous=True,
        ),
        continuous=True,
        normalization=1.0,
        start_index=0,
        jump_norm_sq=1.2,  # int_1^inf 36 (x^-2 - x^-3)^2 dx = 36 (1/3 - 1/2 + 1/5)
    )


def _harmonic() -> ProblemSpec:
    return ProblemSpec(
        id="harmonic",
        coefficient_rule=lambda k: 1.0 / (k + 1),
        exact_rule=lambda k: Fraction(1, k + 1),
        gtilde=lambda lam: 1.0 / (lam + 1.0),
        gtilde_half_plane=-0.5,
        jump=JumpGroundTruth(
            formula=lambda x: 1.0 / x,
            support_lo=1.0,
            variable="x",
            continuous=False,  # J(1) = 1, discontinuous at the cut endpoint
        ),
        continuous=False,
        normalization=1.0,
        start_index=0,
        jump_norm_sq=1.0,  # int_1^inf x^-2 dx
    )


def _rational_unnormalized() -> ProblemSpec:
    return ProblemSpec(
        id="rational_unnormalized",
        coefficient_rule=lambda k: 1.0 / ((k + 2) * (k + 3)),
        exact_rule=lambda k: Fraction(1, (k + 2) * (k + 3)),
        gtilde=lambda lam: 1.0 / ((lam + 2.0) * (lam + 3.0)),
        gtilde_half_plane=-0.5,
        jump=JumpGroundTruth(
            formula=lambda x: x**-2.0 - x**-3.0,
            support_lo=1.0,
            variable="x",
            continuous=True,
        ),
        continuous=True,
        normalization=None,  # gtilde(0) = 1/6; not a probability normalization
        start_index=0,
        jump_norm_sq=1.2 / 36.0,
    )


def _thermal_boson_demo() -> ProblemSpec:
    def rule(k: int) -> float:
        if k < 1:
            raise DomainError("thermal coefficients start at k = 1")
        return 6.0 / ((k + 2) * (k + 3))

    def exact(k: int) -> Fraction:
        if k < 1:
            raise DomainError("thermal coefficients start at k = 1")
        return Fraction(6, (k + 2) * (k + 3))

    return ProblemSpec(
        id="thermal_boson_demo",
        coefficient_rule=rule,
        exact_rule=exact,
        gtilde=lambda lam: 6.0 / ((lam + 2.0) * (lam + 3.0)),
        gtilde_half_plane=0.5,
        jump=JumpGroundTruth(
            formula=lambda v: 6.0 * (np.exp(-2.0 * v) - np.exp(-3.0 * v)),
            support_lo=0.0,
            variable="v",
            continuous=True,
        ),
        continuous=True,
        normalization=1.0,
        start_index=1,
        jump_norm_sq=12.0 / 35.0,  # int_0^inf e^-v 36 (e^-2v - e^-3v)^2 dv
    )


_BUILTINS = {
    "normalized_rational": _normalized_rational,
    "harmonic": _harmonic,
    "rational_unnormalized": _rational_unnormalized,
    "thermal_boson_demo": _thermal_boson_demo,
}
BUILTIN_IDS = tuple(sorted(_BUILTINS))


def builtin(problem_id: str) -> ProblemSpec:
    """Return the built-in problem with the given id.

    Known ids: normalized_rational, harmonic, rational_unnormalized,
    thermal_boson_demo.
    """
    try:
        factory = _BUILTINS[problem_id]
    except KeyError:
        raise InputError(
            f"unknown problem id {problem_id!r}; known ids: {', '.join(BUILTIN_IDS)}"
        ) from None
    return factory()


def gtilde_eval(spec: ProblemSpec, lam: complex) -> complex:
    """Evaluate the problem's coefficient interpolant at a complex point.

    Valid for Re(lambda) >= the problem's half-plane boundary; the
    interpolant restricted to integers k >= start_index reproduces the
    coefficients.
    """
    lam = complex(lam)
    if lam.real < spec.gtilde_half_plane - 1e-12:
        raise DomainError(
            f"lambda = {lam} lies outside Re >= {spec.gtilde_half_plane} for {spec.id}"
        )
    return spec.gtilde(lam)


@dataclass(frozen=True)
class CoefficientSet:
    """A finite, possibly noisy coefficient prefix.

    ``values[j]`` is g_{start_index + j}; power-series data starts at index
    0, thermal data at index 1.  ``epsilon`` bounds |g_k - clean_k| when the
    set was generated with noise.  ``exact_rule`` is carried along for sets
    derived from a built-in with epsilon = 0 so exact-rational diagnostics
    stay available.
    """

    values: np.ndarray
    N: int
    epsilon: float = 0.0
    seed: int | None = None
    source: str = ""
    start_index: int = 0
    exact_rule: Callable[[int], Fraction] | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise InputError("coefficient sets must be non-empty 1-D arrays")
        if not np.all(np.isfinite(vals)):
            raise InputError("coefficient sets must not contain NaN or Inf")
        object.__setattr__(self, "values", vals)
        expected = self.N - self.start_index + 1
        if vals.size != expected:
            raise InputError(
                f"expected {expected} values for indices {self.start_index}..{self.N}, got {vals.size}"
            )


def coefficients(
    spec: ProblemSpec, N: int, epsilon: float = 0.0, seed: int | None = None
) -> CoefficientSet:
    """Generate g_{start}..g_N from a problem spec, optionally with noise."""
    if N < spec.start_index:
        raise InputError(f"N must be >= {spec.start_index} for {spec.id}")
    clean = np.array([spec.coefficient_rule(k) for k in range(spec.start_index, N + 1)])
    cs = CoefficientSet(
        values=clean,
        N=N,
        epsilon=0.0,
        seed=None,
        source=spec.id,
        start_index=spec.start_index,
        exact_rule=spec.exact_rule,
    )
    if epsilon > 0.0:
        cs = add_noise(cs, epsilon, seed if seed is not None else 0)
    return cs


def add_noise(clean: CoefficientSet, epsilon: float, seed: int) -> CoefficientSet:
    """Perturb each coefficient by an independent uniform draw on [-eps, eps].

    The generator is PCG64 with the given 64-bit seed and one vectorized
    draw in ascending k, so identical seeds give bit-identical output on
    every platform.
    """
    if epsilon < 0.0:
        raise InputError("epsilon must be >= 0")
    if epsilon == 0.0:
        return clean
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = rng.uniform(-epsilon, epsilon, clean.values.size)
    return CoefficientSet(
        values=clean.values + noise,
        N=clean.N,
        epsilon=epsilon,
        seed=seed,
        source=clean.source,
        start_index=clean.start_index,
        exact_rule=None,
    )


# --------------------------------------------------------------------------
# Coefficient CSV files: lines "k,value", ascending contiguous k, optional
# first line "# epsilon=<float>".  UTF-8, LF or CRLF.
# --------------------------------------------------------------------------


def _parse_coefficient_lines(text: str) -> tuple[list[tuple[int, float]], float]:
    eps = 0.0
    pairs: list[tuple[int, float]] = []
    lines = text.splitlines()
    start_line = 1
    if lines and lines[0].lstrip().startswith("#"):
        meta = lines[0].lstrip()[1:].strip()
        if meta.startswith("epsilon="):
            try:
                eps = float(meta.split("=", 1)[1])
            except ValueError:
                raise ParseError(f"bad epsilon value in {meta!r}", 1) from None
            if eps < 0.0:
                raise ParseError("epsilon must be >= 0", 1)
        else:
            raise ParseError(f"unrecognized metadata line {lines[0]!r}", 1)
        lines = lines[1:]
        start_line = 2
    for offset, raw in enumerate(lines):
        lineno = start_line + offset
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'k,value', got {raw!r}", lineno)
        try:
            k = int(parts[0])
        except ValueError:
            raise ParseError(f"non-integer index {parts[0]!r}", lineno) from None
        try:
            v = float(parts[1])
        except ValueError:
            raise ParseError(f"non-numeric value {parts[1]!r}", lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"non-finite value {parts[1]!r}", lineno)
        if pairs and k != pairs[-1][0] + 1:
            if k == pairs[-1][0]:
                raise ParseError(f"duplicate index {k}", lineno)
            raise ParseError(f"index gap: {pairs[-1][0]} followed by {k}", lineno)
        pairs.append((k, v))
    if not pairs:
        raise ParseError("no coefficient lines found", start_line)
    return pairs, eps


def _load(path, expected_start: int) -> CoefficientSet:
    text = Path(path).read_text(encoding="utf-8")
    pairs, eps = _parse_coefficient_lines(text)
    if pairs[0][0] != expected_start:
        raise ParseError(
            f"indices must start at {expected_start}, found {pairs[0][0]}",
            2 if text.lstrip().startswith("#") else 1,
        )
    values = np.array([v for _, v in pairs])
    return CoefficientSet(
        values=values,
        N=pairs[-1][0],
        epsilon=eps,
        seed=None,
        source=str(path),
        start_index=expected_start,
    )


def load_coefficients(path) -> CoefficientSet:
    """Load a power-series coefficient file (contiguous indices from 0)."""
    return _load(path, expected_start=0)


def load_thermal_coefficients(path) -> CoefficientSet:
    """Load a thermal coefficient file (contiguous indices from 1)."""
    return _load(path, expected_start=1)


def save_coefficients(cs: CoefficientSet, path) -> None:
    """Write a coefficient set in the CSV contract; round-trips exactly."""
    lines = []
    if cs.epsilon:
        lines.append(f"# epsilon={cs.epsilon!r}")
    for j, v in enumerate(cs.values):
        lines.append(f"{cs.start_index + j},{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
