"""Improper-integral plumbing shared by the spectral and kernel modules.

Finite panels go through scipy's adaptive QUADPACK wrapper.  What this module
adds is the policy layer: cutoff selection from an analytic tail bound,
log-variable tails for algebraically decaying integrands, and a dyadic
refinement probe that distinguishes a genuinely divergent integral (monotone
geometric growth of the partial sums) from plain non-convergence.  All
routines are deterministic for a fixed QuadratureSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import DivergenceError, ToleranceError, ValidationError

#: ratio at or above which dyadic increments count as non-decreasing
_GROWTH_RATIO = 1.0 - 1e-6
#: ratio below which the geometric tail estimate is considered reliable
_FAST_DECAY_RATIO = 0.97


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and cutoffs for improper integrals.

    abs_tol / rel_tol      target accuracy of reported values
    max_depth              number of dyadic refinements in divergence probes
    chamber_cutoff         radial cutoff for integrals over the Weyl chamber
    t_split                split point of the subordination time integral
    t_cutoff               hard upper cutoff of the subordination time integral
    spectral_cutoff_cap    largest admissible spectral cutoff before the
                           dyadic probe takes over from the tail bound
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_depth: int = 14
    chamber_cutoff: float = 40.0
    t_split: float = 1.0
    t_cutoff: float = 80.0
    spectral_cutoff_cap: float = 1e12

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValidationError("quadrature tolerances must be positive")
        for name in ("chamber_cutoff", "t_split", "t_cutoff", "spectral_cutoff_cap"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0:
                raise ValidationError(f"{name} must be finite and positive")
        if self.max_depth < 4:
            raise ValidationError("max_depth must be at least 4")

    def to_json_dict(self) -> dict:
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_depth": self.max_depth,
            "chamber_cutoff": self.chamber_cutoff,
            "t_split": self.t_split,
            "t_cutoff": self.t_cutoff,
        }


DEFAULT_SPEC = QuadratureSpec()


@dataclass
class IntegralOutcome:
    """Value-or-divergence result of an improper integral.

    ``value`` is None exactly when ``diverged`` is True.  ``diagnostics``
    carries the cutoff, tail bound and refinement trace and is JSON-ready.
    """

    value: float | None
    diverged: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return not self.diverged

    def require_finite(self, what: str = "integral") -> float:
        if self.diverged:
            raise DivergenceError(f"{what} diverges", self.diagnostics)
        return self.value


def adaptive(f: Callable[[float], float], a: float, b: float,
             spec: QuadratureSpec = DEFAULT_SPEC, points=None) -> float:
    """Adaptive quadrature on a finite interval."""
    if a == b:
        return 0.0
    kwargs = {"limit": 60 * spec.max_depth,
              "epsabs": spec.abs_tol * 1e-2, "epsrel": spec.rel_tol * 1e-2}
    if points:
        pts = sorted(p for p in points if a < p < b)
        if pts:
            kwargs["points"] = pts
    val, _ = quad(f, a, b, **kwargs)
    return val


def gauss_legendre_nodes(a: float, b: float, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def graded_panel_nodes(a: float, b: float, n_panels: int, order: int, power: float = 2.0):
    """Gauss-Legendre nodes on [a, b] with panels graded toward ``a``."""
    u = np.linspace(0.0, 1.0, n_panels + 1) ** power
    edges = a + (b - a) * u
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre_nodes(lo, hi, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _classify_increments(increments, spec: QuadratureSpec, total: float):
    """Verdict from a trace of non-negative dyadic increments.

    Returns (diverged, tail_estimate, note).  Divergence requires the last
    window of increment ratios to sit at or above 1; clean convergence
    requires them to sit below 1, in which case the geometric tail estimate
    is returned.  Mixed behavior raises ToleranceError.
    """
    inc = [x for x in increments]
    window = min(6, max(3, len(inc) - 1))
    tol = max(spec.abs_tol, spec.rel_tol * max(abs(total), 1.0))
    if len(inc) >= 2 and inc[-1] <= tol and max(inc[-2:]) <= tol:
        return False, inc[-1], "increments below tolerance"
    ratios = []
    for lo, hi in zip(inc[:-1], inc[1:]):
        if lo <= 0.0:
            ratios.append(0.0 if hi <= 0.0 else math.inf)
        else:
            ratios.append(hi / lo)
    if len(ratios) < window:
        raise ToleranceError(
            "refinement trace too short to classify",
            {"increments": inc, "ratios": ratios})
    tail_ratios = ratios[-window:]
    if all(r >= _GROWTH_RATIO for r in tail_ratios):
        return True, math.inf, "monotone geometric growth"
    if all(r < 1.0 for r in tail_ratios):
        r = max(tail_ratios)
        tail = inc[-1] * r / (1.0 - r) if r > 0 else 0.0
        note = "geometric tail" if r < _FAST_DECAY_RATIO else "slow geometric tail (estimate only)"
        return False, tail, note
    raise ToleranceError(
        "dyadic increments neither persistently growing nor decaying",
        {"increments": inc, "ratios": ratios})


def dyadic_outcome(segment: Callable[[float, float], float], spec: QuadratureSpec,
                   direction: str, base: float = 1.0,
                   outer_limit: float | None = None) -> IntegralOutcome:
    """Probe an improper endpoint by dyadic refinement.

    ``segment(a, b)`` integrates the (non-negative) integrand over [a, b].
    ``direction='down'`` probes the endpoint 0 with shells
    [base/2^{k+1}, base/2^k]; ``direction='up'`` probes infinity with
    segments [base*2^k, base*2^{k+1}] (clipped at ``outer_limit``).
    """
    if direction not in ("down", "up"):
        raise ValueError("direction must be 'down' or 'up'")
    increments = []
    edges = []
    for k in range(spec.max_depth):
        if direction == "down":
            a, b = base / 2.0 ** (k + 1), base / 2.0 ** k
        else:
            a, b = base * 2.0 ** k, base * 2.0 ** (k + 1)
            if outer_limit is not None and a >= outer_limit:
                break
            if outer_limit is not None:
                b = min(b, outer_limit)
        increments.append(abs(segment(a, b)))
        edges.append((a, b))
        # early exit once increments are negligible
        if k >= 3 and max(increments[-2:]) <= spec.abs_tol:
            break
    total = float(sum(increments))
    diverged, tail, note = _classify_increments(increments, spec, total)
    diag = {
        "direction": direction,
        "base": base,
        "refinement_trace": increments,
        "tail_estimate": None if diverged else tail,
        "note": note,
    }
    if diverged:
        return IntegralOutcome(None, True, diag)
    return IntegralOutcome(total + (tail if math.isfinite(tail) else 0.0), False, diag)


def ladder_outcome(segment: Callable[[float, float], float], cutoffs,
                   spec: QuadratureSpec) -> IntegralOutcome:
    """Finite/divergent verdict from partial integrals at a cutoff ladder.

    ``cutoffs`` is an increasing sequence of outer radii; the integrand is
    accumulated on [0, c1], [c1, c2], ...  Growing increments mean the
    integral blows up with the cutoff; decaying increments stabilize it.
    """
    cutoffs = list(cutoffs)
    if len(cutoffs) < 3 or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValidationError("cutoff ladder must be increasing with >= 3 rungs")
    edges = [0.0] + cutoffs
    increments = [abs(segment(a, b)) for a, b in zip(edges[:-1], edges[1:])]
    partials = list(np.cumsum(increments))
    total = partials[-1]
    tol = max(spec.abs_tol, spec.rel_tol * max(total, 1.0))
    tail_inc = increments[1:]
    diag = {"cutoffs": cutoffs, "partial_integrals": partials,
            "refinement_trace": increments}
    if all(x <= tol for x in tail_inc):
        diag["note"] = "stabilized below tolerance"
        return IntegralOutcome(total, False, diag)
    ratios = [hi / lo if lo > 0 else math.inf for lo, hi in zip(tail_inc[:-1], tail_inc[1:])]
    diag["ratios"] = ratios
    if all(r >= _GROWTH_RATIO for r in ratios):
        diag["note"] = "geometric growth along the cutoff ladder"
        return IntegralOutcome(None, True, diag)
    if all(r < 1.0 for r in ratios):
        r = max(ratios)
        tail = tail_inc[-1] * r / (1.0 - r) if r > 0 else 0.0
        diag["note"] = "stabilizing; geometric tail estimate"
        diag["tail_estimate"] = tail
        return IntegralOutcome(total + tail, False, diag)
    raise ToleranceError("cutoff ladder is neither stabilizing nor growing", diag)


def halfline_decaying(f: Callable[[float], float], decay_exponent: float,
                      coeff: float, spec: QuadratureSpec,
                      inner: float = 1.0) -> tuple[float, dict]:
    """Integrate f over [0, inf) given the algebraic tail bound
    ``|f(x)| <= coeff * x**decay_exponent`` for x >= inner.

    The cutoff L solves coeff * L^(e+1)/(-e-1) = abs_tol; the tail beyond L
    is discarded and the bound recorded.  Requires decay_exponent < -1.
    Integration runs on [0, inner] directly and on [inner, L] in the
    log variable, which turns power decay into exponential decay.
    """
    e = decay_exponent
    if e >= -1:
        raise ValidationError("tail exponent must be < -1 for a convergent tail")
    coeff = max(coeff, 1e-300)
    L = (spec.abs_tol * (-e - 1.0) / coeff) ** (1.0 / (e + 1.0))
    L = max(L, 2.0 * inner)
    if L > spec.spectral_cutoff_cap:
        raise ToleranceError(
            "tail bound requires an impractical cutoff",
            {"cutoff_needed": L, "cap": spec.spectral_cutoff_cap})
    head = adaptive(f, 0.0, inner, spec)
    tail_val = adaptive(lambda x: f(math.exp(x)) * math.exp(x),
                        math.log(inner), math.log(L), spec)
    tail_bound = coeff * L ** (e + 1.0) / (-e - 1.0)
    diag = {"cutoff": L, "tail_bound": tail_bound, "tail_exponent": e}
    return head + tail_val, diag
