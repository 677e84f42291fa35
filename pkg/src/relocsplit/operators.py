"""Maximally monotone building blocks on R^d and their resolvents.

Two concrete operator kinds are provided: affine maps ``x -> M x + b`` whose
symmetric part is positive semidefinite, and normal cones of boxes (whose
resolvent is the componentwise clamp, independent of the stepsize). Everything
downstream touches operators only through ``resolvent``; set-valued operators
are never materialized as graphs.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    DomainError,
    NonMonotoneOperator,
    NonPositiveStepsize,
    SingularSystem,
    UnsupportedOperator,
    UnsupportedSet,
)

MONOTONE_EIG_TOL = 1e-10
#: condition-number ceiling for direct inversion
MAX_INVERSE_COND = 1e12
#: number of cached resolvent factorizations per operator
RESOLVENT_CACHE_SIZE = 8


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DomainError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DomainError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise DomainError("vector has non-finite coordinates")
    return v


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise NonPositiveStepsize(f"stepsize must be positive, got {gamma}")
    return gamma


class AffineOperator:
    """The maximally monotone operator ``A(x) = M x + b``.

    Monotonicity (positive semidefiniteness of ``(M + M^T)/2``) is verified at
    construction; the strong-monotonicity modulus ``mu`` and the Lipschitz
    constant ``lip`` are computed here once rather than trusted from callers,
    since contraction factors and error-bound constants depend on them.
    """

    single_valued = True

    def __init__(self, M, b=None):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DomainError(f"M must be square, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise DomainError("M has non-finite entries")
        self.M = M
        d = M.shape[0]
        self.b = np.zeros(d) if b is None else as_vector(b, d)

        sym = 0.5 * (M + M.T)
        eigs = np.linalg.eigvalsh(sym)
        if eigs[0] < -MONOTONE_EIG_TOL:
            raise NonMonotoneOperator(
                f"symmetric part has eigenvalue {eigs[0]:.3e} < -{MONOTONE_EIG_TOL}"
            )
        self.sym_eig_min = float(eigs[0])
        self.sym_eig_max = float(eigs[-1])
        self.mu = float(eigs[0]) if eigs[0] > MONOTONE_EIG_TOL else 0.0
        self.lip = float(np.linalg.norm(M, 2))

        self._lock = threading.Lock()
        self._lu_cache: OrderedDict[float, tuple] = OrderedDict()
        self._cond: float | None = None

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.M @ as_vector(x, self.dim) + self.b

    def __repr__(self):
        return f"AffineOperator(dim={self.dim}, mu={self.mu:.4g}, lip={self.lip:.4g})"

    def _factors(self, gamma: float):
        # one LU per stepsize, LRU-evicted; schedules revisit few distinct values
        with self._lock:
            hit = self._lu_cache.get(gamma)
            if hit is not None:
                self._lu_cache.move_to_end(gamma)
                return hit
        try:
            lu = lu_factor(np.eye(self.dim) + gamma * self.M)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by monotonicity
            raise SingularSystem(f"I + gamma*M is singular for gamma={gamma}") from exc
        with self._lock:
            self._lu_cache[gamma] = lu
            while len(self._lu_cache) > RESOLVENT_CACHE_SIZE:
                self._lu_cache.popitem(last=False)
        return lu

    def resolvent(self, gamma: float, x) -> np.ndarray:
        """Evaluate ``(I + gamma*A)^{-1} x`` by a dense linear solve."""
        gamma = _check_gamma(gamma)
        x = as_vector(x, self.dim)
        return lu_solve(self._factors(gamma), x - gamma * self.b)

    def reflected_resolvent(self, gamma: float, x) -> np.ndarray:
        """Evaluate ``2 (I + gamma*A)^{-1} x - x``."""
        x = as_vector(x, self.dim)
        return 2.0 * self.resolvent(gamma, x) - x

    def inverse_apply(self, y) -> np.ndarray:
        """Solve ``M x + b = y`` for x. Requires M invertible (cond <= 1e12)."""
        y = as_vector(y, self.dim)
        if self._cond is None:
            self._cond = float(np.linalg.cond(self.M))
        if not np.isfinite(self._cond) or self._cond > MAX_INVERSE_COND:
            raise SingularSystem(
                f"M is not invertible within tolerance (cond={self._cond:.3e})"
            )
        return np.linalg.solve(self.M, y - self.b)

    def inverse_operator(self) -> "AffineOperator":
        """Return A^{-1} as an affine operator (monotone whenever A is)."""
        if self._cond is None:
            self._cond = float(np.linalg.cond(self.M))
        if not np.isfinite(self._cond) or self._cond > MAX_INVERSE_COND:
            raise SingularSystem("cannot form the inverse of a singular operator")
        Minv = np.linalg.inv(self.M)
        return AffineOperator(Minv, -Minv @ self.b)

    def scaled(self, t: float) -> "AffineOperator":
        """Return ``t*A`` for t > 0."""
        if t <= 0:
            raise DomainError("scaling factor must be positive")
        return AffineOperator(t * self.M, t * self.b)

    @property
    def is_symmetric(self) -> bool:
        scale = max(1.0, float(np.abs(self.M).max()))
        return bool(np.abs(self.M - self.M.T).max() <= 1e-12 * scale)


class BoxNormalCone:
    """Normal cone of the box ``[lower, upper]`` (entries may be +-inf).

    Its resolvent is the projection onto the box, for every stepsize.
    """

    single_valued = False
    mu = 0.0
    lip = np.inf

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.ndim == 0:
            lower = lower.reshape(1)
        if upper.ndim == 0:
            upper = upper.reshape(1)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DomainError("lower and upper must be 1-d with matching shapes")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise DomainError("box bounds must not be NaN")
        if np.any(lower > upper):
            raise DomainError("box is empty: lower > upper somewhere")
        self.lower = lower
        self.upper = upper

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def __repr__(self):
        return f"BoxNormalCone(dim={self.dim})"

    def project(self, x) -> np.ndarray:
        return np.clip(as_vector(x, self.dim), self.lower, self.upper)

    def resolvent(self, gamma: float, x) -> np.ndarray:
        _check_gamma(gamma)
        return self.project(x)

    def reflected_resolvent(self, gamma: float, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        return 2.0 * self.resolvent(gamma, x) - x

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project_normal_cone(self, z, v, face_tol: float = 1e-7) -> np.ndarray:
        """Project ``v`` onto the normal cone at ``z`` (componentwise on faces).

        ``z`` is assumed to lie in the box up to ``face_tol``; coordinates
        within ``face_tol`` of a bound count as active.
        """
        z = as_vector(z, self.dim)
        v = as_vector(v, self.dim)
        out = np.zeros_like(v)
        at_lower = z <= self.lower + face_tol
        at_upper = z >= self.upper - face_tol
        only_lower = at_lower & ~at_upper
        only_upper = at_upper & ~at_lower
        both = at_lower & at_upper  # pinned coordinates admit any normal direction
        out[only_lower] = np.minimum(v[only_lower], 0.0)
        out[only_upper] = np.maximum(v[only_upper], 0.0)
        out[both] = v[both]
        return out


class SingletonSet:
    """The set {point}; projection is constant."""

    def __init__(self, point):
        self.point = as_vector(point)

    def project(self, y) -> np.ndarray:
        as_vector(y, self.point.shape[0])
        return self.point.copy()

    def scaled(self, t: float) -> "SingletonSet":
        if t <= 0:
            raise DomainError("scaling factor must be positive")
        return SingletonSet(t * self.point)


class BoxSet:
    """A box as a plain projectable set (no operator semantics)."""

    def __init__(self, lower, upper):
        cone = BoxNormalCone(lower, upper)  # reuse validation
        self.lower = cone.lower
        self.upper = cone.upper

    def project(self, y) -> np.ndarray:
        return np.clip(as_vector(y, self.lower.shape[0]), self.lower, self.upper)

    def scaled(self, t: float) -> "BoxSet":
        if t <= 0:
            raise DomainError("scaling factor must be positive")
        return BoxSet(t * self.lower, t * self.upper)


@dataclass(frozen=True)
class RelativeMonotonicityReport:
    samples: int
    violations: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_relative_strong_monotonicity(
    op,
    region,
    mu_claim: float,
    sample_count: int,
    seed: int,
    sample_scale: float = 3.0,
    tol: float = 1e-9,
) -> RelativeMonotonicityReport:
    """Sample-test strong monotonicity of ``op`` relative to ``region``.

    Draws ``sample_count`` Gaussian points y, puts p = P_X(y), and checks

        <A(y) - A(p), y - p>  >=  mu_claim * ||y - p||^2 - tol.

    Only single-valued operators are supported; the region must expose a
    ``project`` method.
    """
    if not callable(op):
        raise UnsupportedOperator("operator must be single-valued (callable)")
    project = getattr(region, "project", None)
    if project is None:
        raise UnsupportedSet("region must provide a project(y) method")
    if sample_count < 1:
        raise DomainError("sample_count must be >= 1")

    dim = op.dim
    rng = np.random.default_rng(seed)
    violations = 0
    worst = np.inf
    for _ in range(sample_count):
        y = sample_scale * rng.standard_normal(dim)
        p = project(y)
        gap = y - p
        margin = float((op(y) - op(p)) @ gap - mu_claim * (gap @ gap))
        worst = min(worst, margin)
        if margin < -tol:
            violations += 1
    return RelativeMonotonicityReport(sample_count, violations, worst)
