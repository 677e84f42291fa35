"""Stepsize-parameterized operator families and the relocated iteration driver.

A family bundles the map ``T_gamma``, its fixed-point relocator
``Q_{delta<-gamma}`` and the relocator's Lipschitz constant. The driver runs

    x_{n+1} = Q_{gamma_{n+1} <- gamma_n} T_{gamma_n} x_n

and records residuals per step. Fixed-point membership is only ever certified
through residuals ``||x - T_gamma x|| <= tol * (1 + ||x||)``.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DivergenceDetected,
    DomainError,
    MissingBlocks,
    NonPositiveStepsize,
    NotAFixedPoint,
)
from .operators import as_vector

#: scale-adjusted residual tolerance certifying fixed-point membership
FIXED_POINT_TOL = 1e-8
#: iterate-norm guard; crossing it means the run is not contractive
DIVERGENCE_LIMIT = 1e12
#: widest stepsize interval used when a family has no natural restriction
GAMMA_WIDE = (1e-8, 1e8)


@dataclass(frozen=True)
class StepsizeSchedule:
    """A stepsize sequence gamma_n clamped into [gamma_low, gamma_high].

    Kinds:
      constant     gamma_n = gamma_star
      geometric    gamma_n = clamp(gamma_star + C * r**n), converges R-linearly
      polynomial   gamma_n = clamp(gamma_star + C / (n+1)**p), converges but
                   not R-linearly (counterexample studies)
    """

    kind: str
    gamma_star: float
    gamma_low: float
    gamma_high: float
    C: float = 0.0
    r: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "geometric", "polynomial"):
            raise DomainError(f"unknown schedule kind {self.kind!r}")
        if not (0.0 < self.gamma_low <= self.gamma_high):
            raise DomainError("need 0 < gamma_low <= gamma_high")
        if not (self.gamma_low <= self.gamma_star <= self.gamma_high):
            raise DomainError("gamma_star must lie in [gamma_low, gamma_high]")
        if self.C < 0.0:
            raise DomainError("C must be >= 0")
        if self.kind == "geometric":
            if self.r is None or not (0.0 < self.r < 1.0):
                raise DomainError("geometric schedule needs r in (0, 1)")
        if self.kind == "polynomial":
            if self.p is None or self.p <= 0.0:
                raise DomainError("polynomial schedule needs p > 0")

    @classmethod
    def constant(cls, gamma_star: float, interval: tuple[float, float] | None = None):
        lo, hi = interval if interval is not None else (gamma_star, gamma_star)
        return cls("constant", gamma_star, lo, hi)

    @classmethod
    def geometric(cls, gamma_star: float, C: float, r: float, interval: tuple[float, float]):
        return cls("geometric", gamma_star, interval[0], interval[1], C=C, r=r)

    @classmethod
    def polynomial(cls, gamma_star: float, C: float, p: float, interval: tuple[float, float]):
        return cls("polynomial", gamma_star, interval[0], interval[1], C=C, p=p)

    def gamma(self, n: int) -> float:
        if n < 0:
            raise DomainError("schedule index must be >= 0")
        if self.kind == "constant":
            raw = self.gamma_star
        elif self.kind == "geometric":
            raw = self.gamma_star + self.C * self.r**n
        else:
            raw = self.gamma_star + self.C / (n + 1) ** self.p
        return min(max(raw, self.gamma_low), self.gamma_high)

    def gammas(self, count: int) -> np.ndarray:
        return np.array([self.gamma(n) for n in range(count)])

    @property
    def converges_r_linearly(self) -> bool:
        return self.kind != "polynomial"


class OperatorFamily(abc.ABC):
    """A family (T_gamma) with relocators, over a closed stepsize interval.

    Subclasses set ``dim`` (the driver-facing vector length),
    ``gamma_interval``, an averagedness constant ``alpha`` when known, and
    report a contraction factor through ``contraction_beta`` when one is
    certified (in which case every Fix T_gamma is a singleton).
    """

    dim: int
    gamma_interval: tuple[float, float]
    alpha: float | None = None

    @property
    def contraction_beta(self) -> float | None:
        return None

    @abc.abstractmethod
    def apply(self, gamma: float, x) -> np.ndarray:
        """Evaluate T_gamma at x."""

    @abc.abstractmethod
    def relocate(self, delta: float, gamma: float, x) -> np.ndarray:
        """Evaluate the relocator Q_{delta <- gamma} at x."""

    @abc.abstractmethod
    def relocator_lipschitz(self, delta: float, gamma: float) -> float:
        """A Lipschitz constant (>= 1) of Q_{delta <- gamma}, equal to 1 at delta == gamma."""

    def residual(self, gamma: float, x) -> float:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.apply(gamma, x)))

    def assert_fixed_point(self, gamma: float, x, tol: float = FIXED_POINT_TOL) -> np.ndarray:
        x = as_vector(x, self.dim)
        r = self.residual(gamma, x)
        if r > tol * (1.0 + float(np.linalg.norm(x))):
            raise NotAFixedPoint(
                f"residual {r:.3e} exceeds {tol:.1e}*(1+||x||) at gamma={gamma}"
            )
        return x

    def check_gamma(self, gamma: float) -> float:
        gamma = float(gamma)
        if gamma <= 0:
            raise NonPositiveStepsize(f"stepsize must be positive, got {gamma}")
        lo, hi = self.gamma_interval
        if not (lo - 1e-12 <= gamma <= hi + 1e-12):
            raise DomainError(f"gamma={gamma} outside family interval [{lo}, {hi}]")
        return gamma


@dataclass
class IterateTrace:
    """Per-iteration record: stepsize, iterate, T_gamma(iterate), residual.

    ``blocks`` holds algorithm-specific sequences (z, y, w for the two-operator
    splitting; z and w blocks for the multioperator one) as (rows, k) arrays.
    """

    gammas: np.ndarray
    xs: np.ndarray
    t_of_x: np.ndarray
    residuals: np.ndarray
    dist_to_fix: np.ndarray | None = None
    blocks: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.gammas.shape[0])

    def block(self, name: str) -> np.ndarray:
        try:
            return self.blocks[name]
        except KeyError:
            raise MissingBlocks(f"trace has no block {name!r}") from None


class ScalarShiftFamily(OperatorFamily):
    """The 1-d family T_gamma x = gamma + beta*(x - gamma) with Fix T_gamma = {gamma}.

    Its relocator is the constant map delta, so the iterate sequence started at
    gamma_0 reproduces the stepsize sequence exactly; it converges R-linearly
    precisely when the schedule does. Used as the sharpness counterexample.
    """

    def __init__(self, beta: float, gamma_interval: tuple[float, float] = GAMMA_WIDE):
        if not (0.0 <= beta < 1.0):
            raise DomainError("beta must lie in [0, 1)")
        lo, hi = gamma_interval
        if not (0.0 < lo <= hi):
            raise DomainError("need 0 < gamma_low <= gamma_high")
        self.beta = float(beta)
        self.dim = 1
        self.gamma_interval = (float(lo), float(hi))
        self.alpha = (1.0 + self.beta) / 2.0

    @property
    def contraction_beta(self) -> float:
        return self.beta

    def apply(self, gamma, x):
        gamma = self.check_gamma(gamma)
        x = as_vector(x, 1)
        return gamma + self.beta * (x - gamma)

    def relocate(self, delta, gamma, x):
        delta = self.check_gamma(delta)
        self.check_gamma(gamma)
        as_vector(x, 1)
        return np.array([delta])

    def relocator_lipschitz(self, delta, gamma):
        # the constant map is 0-Lipschitz; constants are declared in [1, inf)
        self.check_gamma(delta)
        self.check_gamma(gamma)
        return 1.0


def relocated_iterate(family: OperatorFamily, schedule: StepsizeSchedule, x0, n_steps: int) -> IterateTrace:
    """Run x_{n+1} = Q_{gamma_{n+1} <- gamma_n} T_{gamma_n} x_n for n_steps steps.

    Returns a trace with rows n = 0..n_steps; every row carries T_gamma_n(x_n)
    and the residual ||x_n - T_gamma_n x_n||.
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    x = as_vector(x0, family.dim)
    gams = [family.check_gamma(schedule.gamma(n)) for n in range(n_steps + 1)]

    xs, ts, res = [], [], []
    for n in range(n_steps + 1):
        size = float(np.linalg.norm(x))
        if not np.isfinite(size) or size > DIVERGENCE_LIMIT:
            raise DivergenceDetected(f"||x_{n}|| exceeded {DIVERGENCE_LIMIT:.0e}")
        t = family.apply(gams[n], x)
        xs.append(x)
        ts.append(t)
        res.append(float(np.linalg.norm(x - t)))
        if n < n_steps:
            x = family.relocate(gams[n + 1], gams[n], t)
    return IterateTrace(np.array(gams), np.vstack(xs), np.vstack(ts), np.array(res))


def relocator_only_sequence(
    family: OperatorFamily,
    schedule: StepsizeSchedule,
    c0,
    n_steps: int,
    row_tol: float = 1e-7,
) -> IterateTrace:
    """Run c_{n+1} = Q_{gamma_{n+1} <- gamma_n} c_n from a fixed point c0 of T_{gamma_0}.

    Each c_n must remain a fixed point of T_{gamma_n}; a row violating the
    residual certificate ``row_tol * (1 + ||c_n||)`` raises NotAFixedPoint
    (it would signal a broken relocator).
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    c = family.assert_fixed_point(schedule.gamma(0), c0)
    gams = [family.check_gamma(schedule.gamma(n)) for n in range(n_steps + 1)]

    cs, ts, res = [], [], []
    for n in range(n_steps + 1):
        t = family.apply(gams[n], c)
        r = float(np.linalg.norm(c - t))
        if r > row_tol * (1.0 + float(np.linalg.norm(c))):
            raise NotAFixedPoint(
                f"relocated point left the fixed-point set at step {n} (residual {r:.3e})"
            )
        cs.append(c)
        ts.append(t)
        res.append(r)
        if n < n_steps:
            c = family.relocate(gams[n + 1], gams[n], c)
    return IterateTrace(np.array(gams), np.vstack(cs), np.vstack(ts), np.array(res))


@dataclass(frozen=True)
class SummabilityReport:
    partial_sums: np.ndarray
    converged: bool
    tail_increment: float


def summability_report(family: OperatorFamily, schedule: StepsizeSchedule, n_terms: int) -> SummabilityReport:
    """Cumulative sums of (L_{gamma_{n+1} <- gamma_n} - 1) with a convergence flag.

    ``converged`` is True when the increment over the last 10% of terms falls
    below 1e-10; divergent stepsize schedules keep the tail visibly positive.
    """
    if n_terms < 10:
        raise DomainError("n_terms must be >= 10")
    gams = schedule.gammas(n_terms + 1)
    terms = np.array(
        [family.relocator_lipschitz(gams[n + 1], gams[n]) - 1.0 for n in range(n_terms)]
    )
    sums = np.cumsum(terms)
    k = max(1, n_terms // 10)
    tail = float(sums[-1] - sums[-k - 1]) if k < n_terms else float(sums[-1])
    return SummabilityReport(sums, tail < 1e-10, tail)


@dataclass(frozen=True)
class GammaLipschitzProbe:
    L_estimate: float
    max_ratio_point: tuple[np.ndarray, float, float]
    samples: int


def gamma_lipschitz_probe(
    family: OperatorFamily,
    fixed_points: list[tuple[np.ndarray, float]],
    deltas: list[float],
) -> GammaLipschitzProbe:
    """Estimate sup ||Q_{delta<-gamma} x - x|| / |delta - gamma| over fixed points.

    Every (x, gamma) must pass the fixed-point residual certificate; delta ==
    gamma pairs are skipped. The supremum witnesses the Lipschitz-in-stepsize
    behaviour of the relocator along the fixed-point sets.
    """
    best = -np.inf
    best_point = None
    count = 0
    for x, gamma in fixed_points:
        x = family.assert_fixed_point(gamma, x)
        for delta in deltas:
            family.check_gamma(delta)
            if delta == gamma:
                continue
            moved = family.relocate(delta, gamma, x)
            ratio = float(np.linalg.norm(moved - x)) / abs(delta - gamma)
            count += 1
            if ratio > best:
                best = ratio
                best_point = (x, float(gamma), float(delta))
    if best_point is None:
        raise DomainError("no (fixed point, delta) pair with delta != gamma")
    return GammaLipschitzProbe(best, best_point, count)
