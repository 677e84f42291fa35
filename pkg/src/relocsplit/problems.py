"""Seeded synthetic monotone inclusions for experiments and tests.

All generators are deterministic functions of the seed. Symmetric positive
(semi)definite matrices are built by conjugating a fixed spectrum with a
random orthogonal matrix, so the extreme eigenvalues hit their targets by
construction.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .operators import AffineOperator, BoxNormalCone

PROBLEM_KINDS = (
    "affine_strongly_monotone",
    "affine_skew_plus_strong",
    "affine_plus_box",
    "custom_matrices",
)


def symmetric_operator(dim: int, lam_min: float, lam_max: float, rng) -> AffineOperator:
    """Symmetric operator with spectrum linspace(lam_min, lam_max) and random offset."""
    if lam_min == lam_max:
        M = lam_min * np.eye(dim)
    else:
        Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        M = (Q * np.linspace(lam_min, lam_max, dim)) @ Q.T
        M = 0.5 * (M + M.T)
    return AffineOperator(M, rng.standard_normal(dim))


def skew_operator(dim: int, lip: float, rng) -> AffineOperator:
    """Skew-symmetric operator scaled to ||M|| = lip (monotone, not strongly)."""
    if dim < 2:
        raise ConfigError("skew operators need dim >= 2")
    G = rng.standard_normal((dim, dim))
    K = 0.5 * (G - G.T)
    K *= lip / np.linalg.norm(K, 2)
    return AffineOperator(K, rng.standard_normal(dim))


def generate_problem(
    kind: str,
    dim: int,
    seed: int,
    mu_target: float,
    L_target: float,
    n_operators: int = 2,
    box_half_width: float = 1.0,
    matrices_path: str | None = None,
) -> list:
    """Build the operator list for one synthetic inclusion.

    affine_strongly_monotone: n-1 symmetric operators with spectrum
        [mu_target, L_target], plus one merely-monotone symmetric tail
        (spectrum [0, L_target]) when n_operators > 2; for pairs both are
        strongly monotone.
    affine_skew_plus_strong: n-1 skew operators with norm L_target plus one
        strongly monotone symmetric tail.
    affine_plus_box: n-1 strongly monotone symmetric operators plus the
        normal cone of [-box_half_width, box_half_width]^dim.
    custom_matrices: arrays M1, b1, M2, b2, ... loaded from an .npz file,
        optionally followed by box_lower/box_upper bounds.
    """
    if kind not in PROBLEM_KINDS:
        raise ConfigError(f"unknown problem kind {kind!r}")
    if kind != "custom_matrices":
        if dim < 1:
            raise ConfigError("dim must be >= 1")
        if n_operators < 2:
            raise ConfigError("need at least two operators")
        if not (0.0 < mu_target <= L_target):
            raise ConfigError("need 0 < mu_target <= L_target")

    rng = np.random.default_rng(seed)
    if kind == "affine_strongly_monotone":
        ops = [symmetric_operator(dim, mu_target, L_target, rng) for _ in range(n_operators - 1)]
        if n_operators == 2:
            ops.append(symmetric_operator(dim, mu_target, L_target, rng))
        else:
            ops.append(symmetric_operator(dim, 0.0, L_target, rng))
        return ops
    if kind == "affine_skew_plus_strong":
        ops = [skew_operator(dim, L_target, rng) for _ in range(n_operators - 1)]
        ops.append(symmetric_operator(dim, mu_target, L_target, rng))
        return ops
    if kind == "affine_plus_box":
        ops = [symmetric_operator(dim, mu_target, L_target, rng) for _ in range(n_operators - 1)]
        ops.append(BoxNormalCone(-box_half_width * np.ones(dim), box_half_width * np.ones(dim)))
        return ops

    # custom_matrices
    if matrices_path is None:
        raise ConfigError("custom_matrices needs problem.matrices_path")
    try:
        data = np.load(matrices_path)
    except OSError as exc:
        raise ConfigError(f"cannot read matrices file {matrices_path}: {exc}") from exc
    ops = []
    i = 1
    while f"M{i}" in data:
        b = data[f"b{i}"] if f"b{i}" in data else None
        ops.append(AffineOperator(data[f"M{i}"], b))
        i += 1
    if "box_lower" in data:
        ops.append(BoxNormalCone(data["box_lower"], data["box_upper"]))
    if len(ops) < 2:
        raise ConfigError("custom_matrices file must define at least M1, M2")
    return ops
