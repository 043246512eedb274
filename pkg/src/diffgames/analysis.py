"""Structure analysis: splitting game dynamics into gradient-like and
rotational parts, classifying games and fixed points, and the alignment
machinery that picks the sign of the adjustment weight.

The central object is the split of the game Hessian H into its symmetric
part S (a potential force) and antisymmetric part A (a rotational force).
Both the game class and the stability of fixed points are read off S and A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivatives import (DEFAULT_CONFIG, DifferentiationConfig, full_hessian,
                          grad_hamiltonian, simultaneous_gradient)
from .games import Game, QuadraticGame

Array = np.ndarray

STABLE = "stable"
UNSTABLE = "unstable"
INDEFINITE = "indefinite"

POTENTIAL = "potential"
HAMILTONIAN = "hamiltonian"
GENERAL = "general"

# Neighborhood probing for non-quadratic games: the stability condition is
# checked at the point plus this many perturbed samples at this radius.
_NEIGHBORHOOD_SAMPLES = 8
_NEIGHBORHOOD_RADIUS = 1e-3


class NotAFixedPointError(ValueError):
    """Raised when a fixed-point query is made away from a zero of the field."""


@dataclass(frozen=True)
class Decomposition:
    """Symmetric/antisymmetric split of a (game) Hessian.

    ``s_eigenvalues`` are the eigenvalues of the symmetric part, sorted
    descending.  ``additive_condition_number`` is their spread
    sigma_max - sigma_min; it is zero exactly when S is a multiple of the
    identity, in which case S commutes with every matrix.
    """

    hessian: Array
    symmetric: Array
    antisymmetric: Array
    s_eigenvalues: Array
    additive_condition_number: float


@dataclass(frozen=True)
class GameClass:
    """Classification over sampled points with the worst-case deviations."""

    kind: str  # POTENTIAL | HAMILTONIAN | GENERAL
    max_antisymmetric: float  # max |A|_inf over the samples
    max_symmetric: float      # max |S|_inf over the samples


@dataclass(frozen=True)
class FixedPointReport:
    w: Array
    xi_norm: float
    stability: str  # STABLE | UNSTABLE | INDEFINITE
    is_local_nash: bool
    probe_value: float  # <xi, grad 1/2|xi|^2> averaged just off the point


def helmholtz_split(hessian) -> Decomposition:
    """Split a square matrix into symmetric and antisymmetric parts.

    The split M = S + A with S = (M + M')/2 and A = (M - M')/2 is exact and
    unique, and is preserved by any orthogonal change of coordinates.
    """
    h = np.asarray(hessian, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    sym = 0.5 * (h + h.T)
    anti = 0.5 * (h - h.T)
    eigs = np.linalg.eigvalsh(sym)[::-1]
    kappa = float(eigs[0] - eigs[-1])
    return Decomposition(
        hessian=h, symmetric=sym, antisymmetric=anti,
        s_eigenvalues=eigs, additive_condition_number=kappa,
    )


def _inf_norm(m: Array) -> float:
    return float(np.max(np.abs(m), initial=0.0))


def classify_game(game: Game, sample_points, tol: float | None = None,
                  config: DifferentiationConfig = DEFAULT_CONFIG) -> GameClass:
    """Classify a game over sample points.

    Potential when the antisymmetric Hessian part vanishes at every sample,
    hamiltonian when the symmetric part does, general otherwise.  The default
    tolerance is 1e-9 times the largest Hessian entry seen.
    """
    points = [np.asarray(p, dtype=float).reshape(-1) for p in sample_points]
    if not points:
        raise ValueError("need at least one sample point")
    max_a = max_s = max_h = 0.0
    for w in points:
        dec = helmholtz_split(full_hessian(game, w, config))
        max_a = max(max_a, _inf_norm(dec.antisymmetric))
        max_s = max(max_s, _inf_norm(dec.symmetric))
        max_h = max(max_h, _inf_norm(dec.hessian))
    if tol is None:
        tol = 1e-9 * max(max_h, 1e-300)
    if max_a <= tol:
        kind = POTENTIAL
    elif max_s <= tol:
        kind = HAMILTONIAN
    else:
        kind = GENERAL
    return GameClass(kind=kind, max_antisymmetric=max_a, max_symmetric=max_s)


def stability_probe(game: Game, w,
                    config: DifferentiationConfig = DEFAULT_CONFIG) -> float:
    """The scalar <xi, H' xi> = xi' S xi.

    For xi != 0 its sign witnesses the definiteness of S: nonnegative where
    S is positive semidefinite, negative where S is negative definite, and
    identically zero in games with no symmetric part.
    """
    xi = simultaneous_gradient(game, w).xi
    return float(xi @ grad_hamiltonian(game, w, config))


def _psd_tolerance(eigs: Array) -> float:
    return 1e-9 * max(1.0, float(eigs[0] - eigs[-1]))


def _stability_at(game: Game, w: Array, config) -> tuple[str, Decomposition]:
    dec = helmholtz_split(full_hessian(game, w, config))
    tol = _psd_tolerance(dec.s_eigenvalues)
    if dec.s_eigenvalues[-1] >= -tol:
        return STABLE, dec
    if dec.s_eigenvalues[0] < -tol:
        return UNSTABLE, dec
    return INDEFINITE, dec


def classify_fixed_point(game: Game, w, fixed_point_tol: float = 1e-8,
                         config: DifferentiationConfig = DEFAULT_CONFIG) -> FixedPointReport:
    """Stability and local-Nash status of a fixed point.

    Raises NotAFixedPointError when ``|xi(w)| > fixed_point_tol``.  Stability
    comes from the eigenvalues of S: all nonnegative (within a spread-scaled
    tolerance) is stable, all negative is unstable, otherwise indefinite.
    Quadratic games have a constant S, so the point itself decides; other
    games are probed at the point plus a few nearby samples, and the verdict
    must agree on all of them.  ``is_local_nash`` checks that each player's
    own diagonal block of S is positive semidefinite.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    ev = simultaneous_gradient(game, w)
    xi_norm = float(np.sqrt(ev.norm_sq))
    if xi_norm > fixed_point_tol:
        raise NotAFixedPointError(
            f"|xi(w)| = {xi_norm:.3e} exceeds the fixed-point tolerance "
            f"{fixed_point_tol:.3e}"
        )

    rng = np.random.default_rng(0)
    nearby = [w + _NEIGHBORHOOD_RADIUS * rng.standard_normal(w.size)
              for _ in range(_NEIGHBORHOOD_SAMPLES)]

    stability, dec = _stability_at(game, w, config)
    if not isinstance(game, QuadraticGame):
        # S varies with w: the verdict must hold throughout the neighborhood.
        for p in nearby:
            verdict, _ = _stability_at(game, p, config)
            if verdict != stability:
                stability = INDEFINITE
                break

    tol = _psd_tolerance(dec.s_eigenvalues)
    is_nash = True
    for i in range(game.num_players):
        blk = game.partition.block(i)
        block_eigs = np.linalg.eigvalsh(dec.symmetric[blk, blk])
        if block_eigs[0] < -tol:
            is_nash = False
            break

    probe = float(np.mean([stability_probe(game, p, config) for p in nearby]))
    return FixedPointReport(w=w, xi_norm=xi_norm, stability=stability,
                            is_local_nash=is_nash, probe_value=probe)


def alignment_sign(xi, at_xi, grad_h, epsilon: float = 0.1) -> float:
    """Sign choice for the adjustment weight.

    Returns the sign of ``(1/d) <xi, grad_h> <at_xi, grad_h> + epsilon``,
    with sign(0) defined as +1.  The epsilon bias breaks ties toward stable
    fixed points; note the product scales like |xi|^4, so a fixed epsilon
    dominates near fixed points (epsilon is exposed for exactly that reason).
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    at_xi = np.asarray(at_xi, dtype=float).reshape(-1)
    grad_h = np.asarray(grad_h, dtype=float).reshape(-1)
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    value = float(xi @ grad_h) * float(at_xi @ grad_h) / xi.size + epsilon
    return 1.0 if value >= 0.0 else -1.0


def infinitesimal_alignment(u, v, w) -> float:
    """Derivative at lambda = 0 of cos^2 of the angle between u + lambda v
    and w, in closed form:

        2 <u,w> (<v,w> |u|^2 - <u,w> <u,v>) / (|u|^4 |w|^2)

    Positive values mean a small positive lambda bends u toward w when they
    already point the same way, or away from w when they do not.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    w = np.asarray(w, dtype=float).reshape(-1)
    uu = float(u @ u)
    ww = float(w @ w)
    if uu == 0.0 or ww == 0.0:
        raise ValueError("u and w must be nonzero")
    uw = float(u @ w)
    vw = float(v @ w)
    uv = float(u @ v)
    return 2.0 * uw * (vw * uu - uw * uv) / (uu * uu * ww)
