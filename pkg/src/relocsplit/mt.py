"""Multioperator resolvent splitting with variable stepsizes.

For N >= 2 maximally monotone operators the algorithmic map acts on block
vectors x = (x^1, ..., x^{N-1}) via a chain of N resolvent evaluations

    z^1 = J_{gamma A1} x^1
    z^i = J_{gamma Ai}(z^{i-1} + x^i - x^{i-1})       i = 2..N-1
    z^N = J_{gamma AN}(z^1 + z^{N-1} - x^{N-1})
    T_gamma x = x + theta * (z^2 - z^1, ..., z^N - z^{N-1})

with relaxation theta in (0, 1). Fixed points of T_gamma correspond exactly to
zeros of A1 + ... + AN through the common resolvent value z. The relocator
replaces every block i by (delta/gamma) x^i + (1 - delta/gamma) J_{gamma A1} x^1.

Block vectors are stored flat with stride ``space_dim``; the block count is
part of the family, so the generic driver stays oblivious to N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadBlockCount,
    CertificationFailed,
    ChainMismatch,
    DivergenceDetected,
    DomainError,
    UnsupportedOperator,
)
from .family import DIVERGENCE_LIMIT, IterateTrace, OperatorFamily, StepsizeSchedule
from .operators import BoxNormalCone, as_vector

_UNSET = object()
#: margin keeping the relaxation parameter strictly inside (0, 1)
_THETA_MARGIN = 1e-6


@dataclass(frozen=True)
class MTLipschitzConstants:
    """Two Lipschitz constants for the block relocator.

    ``L_check`` is the loose, analysis-friendly constant

        sqrt(d/g) + sqrt(|g-d|/g) * max{sqrt(N-1), sqrt(2N) sqrt(d/g)}

    and ``L_hat`` the tighter one

        max{sqrt(d/g + (N-1)|g-d|/g), sqrt(d/g + 2N (d/g) |g-d|/g)}.

    Always L_hat <= L_check, both equal 1 at d == g, and both are bounded
    below by min{1, sqrt(d/g)}.
    """

    L_check: float
    L_hat: float


def mt_relocator_lipschitz(delta: float, gamma: float, n_operators: int) -> MTLipschitzConstants:
    if delta <= 0 or gamma <= 0:
        raise DomainError("stepsizes must be positive")
    if n_operators < 2:
        raise DomainError("need at least two operators")
    N = n_operators
    s = delta / gamma
    q = abs(gamma - delta) / gamma
    l_check = math.sqrt(s) + math.sqrt(q) * max(math.sqrt(N - 1), math.sqrt(2 * N) * math.sqrt(s))
    l_hat = max(math.sqrt(s + (N - 1) * q), math.sqrt(s + 2 * N * s * q))
    return MTLipschitzConstants(l_check, l_hat)


class MTFamily(OperatorFamily):
    """Resolvent-splitting family on H^{N-1} for operators A1..AN.

    The driver-facing dimension is ``(N-1) * space_dim``. No averagedness
    constant is carried; diagnostics that need one use the contraction factor
    (certified empirically through ``mt_contraction_certificate`` when the
    structural hypotheses hold).
    """

    alpha = None

    def __init__(self, operators, theta: float = 0.5, gamma_interval: tuple[float, float] = (0.5, 2.0)):
        operators = list(operators)
        if len(operators) < 2:
            raise DomainError("need at least two operators")
        dims = {op.dim for op in operators}
        if len(dims) != 1:
            raise DomainError(f"operator dimensions differ: {sorted(dims)}")
        if not (_THETA_MARGIN < theta < 1.0 - _THETA_MARGIN):
            raise DomainError("theta must lie strictly inside (0, 1)")
        lo, hi = float(gamma_interval[0]), float(gamma_interval[1])
        if not (0.0 < lo <= hi):
            raise DomainError("need 0 < gamma_low <= gamma_high")
        self.operators = operators
        self.theta = float(theta)
        self.space_dim = operators[0].dim
        self.n_operators = len(operators)
        self.n_blocks = self.n_operators - 1
        self.dim = self.n_blocks * self.space_dim
        self.gamma_interval = (lo, hi)
        self._beta = _UNSET

    def split_blocks(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.dim:
            raise BadBlockCount(
                f"expected {self.n_blocks} blocks of size {self.space_dim} "
                f"({self.dim} entries), got {x.shape[0]}"
            )
        if not np.all(np.isfinite(x)):
            raise DomainError("block vector has non-finite coordinates")
        return x.reshape(self.n_blocks, self.space_dim)

    def z_chain(self, gamma: float, x_blocks: np.ndarray) -> np.ndarray:
        """The N resolvent values z^1..z^N driven by the block vector."""
        ops = self.operators
        K = self.n_blocks
        z = np.empty((self.n_operators, self.space_dim))
        z[0] = ops[0].resolvent(gamma, x_blocks[0])
        for i in range(1, K):
            z[i] = ops[i].resolvent(gamma, z[i - 1] + x_blocks[i] - x_blocks[i - 1])
        z[K] = ops[K].resolvent(gamma, z[0] + z[K - 1] - x_blocks[K - 1])
        return z

    def apply_with_blocks(self, gamma: float, x) -> tuple[np.ndarray, np.ndarray]:
        gamma = self.check_gamma(gamma)
        xb = self.split_blocks(x)
        z = self.z_chain(gamma, xb)
        t = xb + self.theta * (z[1:] - z[:-1])
        return t.ravel(), z

    def apply(self, gamma, x):
        return self.apply_with_blocks(gamma, x)[0]

    def relocate(self, delta, gamma, x):
        delta = self.check_gamma(delta)
        gamma = self.check_gamma(gamma)
        xb = self.split_blocks(x)
        s = delta / gamma
        anchor = self.operators[0].resolvent(gamma, xb[0])
        return (s * xb + (1.0 - s) * anchor[None, :]).ravel()

    def relocator_lipschitz(self, delta, gamma):
        # the summability hypothesis is checked with the analysis constant
        return mt_relocator_lipschitz(delta, gamma, self.n_operators).L_check

    @property
    def contraction_beta(self) -> float | None:
        if self._beta is _UNSET:
            self._beta = None
            for case in ("last_strong", "first_strong"):
                cert = mt_contraction_certificate(self, case)
                if cert.valid:
                    self._beta = cert.beta
                    break
        return self._beta


def algorithm2_run(fam: MTFamily, schedule: StepsizeSchedule, x0, n_steps: int) -> IterateTrace:
    """Run the variable-stepsize resolvent splitting in its per-step form.

    Step 1 builds the z-chain from the carried z^1 and forms
    w_n = x_n + theta*(z^2 - z^1, ...); Step 2 computes
    z_{n+1}^1 = J_{gamma_n A1} w_n^1, relocates the first block through it and
    shifts the remaining blocks by (gamma_{n+1}/gamma_n)(w^i - w^1).

    The x-sequence agrees with ``relocated_iterate`` on the same family. Trace
    blocks: "z" holds the N chain values per row, "w" the intermediate iterate
    (equal to T_{gamma_n} x_n).
    """
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    xb = fam.split_blocks(as_vector(x0, fam.dim))
    gams = [fam.check_gamma(schedule.gamma(n)) for n in range(n_steps + 1)]
    ops = fam.operators
    K = fam.n_blocks
    z1 = ops[0].resolvent(gams[0], xb[0])

    xs, zs, ws, res = [], [], [], []
    for n in range(n_steps + 1):
        size = float(np.linalg.norm(xb))
        if not np.isfinite(size) or size > DIVERGENCE_LIMIT:
            raise DivergenceDetected(f"||x_{n}|| exceeded {DIVERGENCE_LIMIT:.0e}")
        z = np.empty((fam.n_operators, fam.space_dim))
        z[0] = z1
        for i in range(1, K):
            z[i] = ops[i].resolvent(gams[n], z[i - 1] + xb[i] - xb[i - 1])
        z[K] = ops[K].resolvent(gams[n], z[0] + z[K - 1] - xb[K - 1])
        wb = xb + fam.theta * (z[1:] - z[:-1])
        xs.append(xb.ravel().copy())
        zs.append(z.ravel())
        ws.append(wb.ravel().copy())
        res.append(float(np.linalg.norm(xb - wb)))
        if n == n_steps:
            break
        ratio = gams[n + 1] / gams[n]
        z1 = ops[0].resolvent(gams[n], wb[0])
        x1 = ratio * wb[0] + (1.0 - ratio) * z1
        new_xb = np.empty_like(xb)
        new_xb[0] = x1
        for i in range(1, K):
            new_xb[i] = ratio * (wb[i] - wb[0]) + x1
        xb = new_xb

    ws_arr = np.vstack(ws)
    return IterateTrace(
        np.array(gams),
        np.vstack(xs),
        ws_arr,
        np.array(res),
        blocks={"z": np.vstack(zs), "w": ws_arr},
    )


@dataclass(frozen=True)
class MTZeroCertificate:
    z: np.ndarray
    inclusion_residual: float
    chain_residuals: np.ndarray


def mt_fixed_point_to_zero(
    fam: MTFamily,
    gamma: float,
    x,
    chain_tol: float = 1e-7,
) -> MTZeroCertificate:
    """Recover the zero of A1 + ... + AN encoded by a fixed point of T_gamma.

    Certifies the whole chain z = J_{gamma A1} x^1 = J_{gamma Ai}(x^i - x^{i-1} + z)
    = J_{gamma AN}(2z - x^{N-1}); a residual above ``chain_tol`` raises
    ChainMismatch since the correspondence is an equivalence. The inclusion
    residual is ||sum_i A_i(z)|| for single-valued operators; one trailing
    normal cone is handled through its face inequalities.
    """
    gamma = fam.check_gamma(gamma)
    x = fam.assert_fixed_point(gamma, x)
    xb = fam.split_blocks(x)
    ops = fam.operators
    K = fam.n_blocks

    z = ops[0].resolvent(gamma, xb[0])
    chain = []
    for i in range(1, K):
        chain.append(float(np.linalg.norm(z - ops[i].resolvent(gamma, xb[i] - xb[i - 1] + z))))
    chain.append(float(np.linalg.norm(z - ops[K].resolvent(gamma, 2.0 * z - xb[K - 1]))))
    chain = np.array(chain)
    if np.any(chain > chain_tol):
        raise ChainMismatch(
            f"resolvent chain residuals {chain} exceed {chain_tol:.1e} at a certified fixed point"
        )

    cones = [op for op in ops if isinstance(op, BoxNormalCone)]
    pointwise = [op for op in ops if not isinstance(op, BoxNormalCone)]
    if len(cones) > 1:
        raise UnsupportedOperator("inclusion residual supports at most one normal cone")
    if any(not callable(op) for op in pointwise):
        raise UnsupportedOperator("inclusion residual needs single-valued operators")

    total = np.zeros(fam.space_dim)
    for op in pointwise:
        total = total + op(z)
    if not cones:
        residual = float(np.linalg.norm(total))
    else:
        cone = cones[0]
        feasibility = float(np.linalg.norm(z - cone.project(z)))
        target = -total  # need -sum_i A_i(z) in N_C(z)
        cone_gap = float(np.linalg.norm(cone.project_normal_cone(z, target) - target))
        residual = feasibility + cone_gap
    return MTZeroCertificate(z, residual, chain)


@dataclass(frozen=True)
class ContractionCertificate:
    valid: bool
    beta: float | None
    case: str
    reason: str


def mt_contraction_certificate(
    fam: MTFamily,
    which_case: str,
    n_pairs: int = 400,
    n_gammas: int = 5,
    seed: int = 2024,
    sample_scale: float = 3.0,
) -> ContractionCertificate:
    """Check the structural contraction hypotheses and certify a factor by sampling.

    Cases:
      "last_strong"   A1..A_{N-1} single-valued monotone Lipschitz, AN strongly monotone
      "first_strong"  A1..A_{N-1} strongly monotone Lipschitz, AN merely monotone

    When the hypotheses hold, beta is the largest sampled ratio
    ||T_gamma u - T_gamma v|| / ||u - v|| over a stepsize grid; a ratio at or
    above 1 - 1e-6 raises CertificationFailed (theory forbids it). When they
    fail, the certificate comes back with valid=False and no factor.
    """
    ops = fam.operators
    head, last = ops[:-1], ops[-1]
    if which_case == "last_strong":
        structural = all(
            getattr(op, "single_valued", False) and np.isfinite(getattr(op, "lip", np.inf))
            for op in head
        ) and getattr(last, "mu", 0.0) > 0.0
        reason = "" if structural else "need Lipschitz single-valued heads and a strongly monotone tail"
    elif which_case == "first_strong":
        structural = all(
            getattr(op, "single_valued", False)
            and np.isfinite(getattr(op, "lip", np.inf))
            and getattr(op, "mu", 0.0) > 0.0
            for op in head
        )
        reason = "" if structural else "need strongly monotone Lipschitz heads"
    else:
        raise DomainError(f"unknown case {which_case!r}")

    if not structural:
        return ContractionCertificate(False, None, which_case, reason)

    rng = np.random.default_rng(seed)
    lo, hi = fam.gamma_interval
    beta = 0.0
    for gamma in np.linspace(lo, hi, n_gammas):
        for _ in range(n_pairs):
            u = sample_scale * rng.standard_normal(fam.dim)
            v = sample_scale * rng.standard_normal(fam.dim)
            denom = float(np.linalg.norm(u - v))
            if denom < 1e-12:
                continue
            ratio = float(np.linalg.norm(fam.apply(gamma, u) - fam.apply(gamma, v))) / denom
            beta = max(beta, ratio)
    if beta >= 1.0 - 1e-6:
        raise CertificationFailed(
            f"sampled Lipschitz ratio {beta:.8f} is not a contraction despite the hypotheses"
        )
    return ContractionCertificate(True, beta, which_case, "")


def mt_summability_bound(schedule: StepsizeSchedule, n_operators: int) -> float:
    """Upper bound on sum_n (L_check(gamma_{n+1} <- gamma_n) - 1) for geometric schedules.

    With |gamma_n - gamma*| <= C r^n the per-term bound is M sqrt(r)^n where

        M = C(1+r)/(2 gamma_low) + sqrt(C(1+r)/gamma_low) * max{sqrt(N-1),
            sqrt(2N) sqrt(gamma_high/gamma_low)}

    giving the geometric-series total M / (1 - sqrt(r)).
    """
    if schedule.kind == "constant":
        return 0.0
    if schedule.kind != "geometric":
        raise DomainError("summability bound requires an R-linearly convergent schedule")
    if n_operators < 2:
        raise DomainError("need at least two operators")
    N = n_operators
    C, r = schedule.C, schedule.r
    lo, hi = schedule.gamma_low, schedule.gamma_high
    factor = max(math.sqrt(N - 1), math.sqrt(2 * N) * math.sqrt(hi / lo))
    M = C * (1.0 + r) / (2.0 * lo) + math.sqrt(C * (1.0 + r) / lo) * factor
    return M / (1.0 - math.sqrt(r))
