"""First- and second-order machinery on games.

The simultaneous gradient xi stacks each player's own-loss gradient.  Its
Jacobian, the game Hessian H, is reached only through Hessian-vector
products: ``hvp`` for H v, ``thvp`` for H' v.  Both have an analytic path
(used whenever the game carries an analytic Hessian) and a central
finite-difference path that serves as an independent cross-check and covers
user-supplied games without second-order information.

No autodiff framework is involved; every built-in game is closed-form and
the finite differences are the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import Game

Array = np.ndarray

_MODES = ("analytic", "fd")


@dataclass(frozen=True)
class DifferentiationConfig:
    """Knobs for derivative evaluation.

    fd_step_scale : float
        Central-difference step is ``scale * (1 + |w|_inf)``; must lie in
        [1e-9, 1e-2].  The default 1e-6 balances truncation and roundoff.
    hvp_mode : str
        "analytic" prefers the game's analytic Hessian and falls back to
        finite differences; "fd" forces finite differences (oracle path).
    """

    fd_step_scale: float = 1e-6
    hvp_mode: str = "analytic"

    def __post_init__(self):
        if not (1e-9 <= self.fd_step_scale <= 1e-2):
            raise ValueError(
                f"fd_step_scale must be in [1e-9, 1e-2], got {self.fd_step_scale}"
            )
        if self.hvp_mode not in _MODES:
            raise ValueError(f"hvp_mode must be one of {_MODES}")


DEFAULT_CONFIG = DifferentiationConfig()
FD_CONFIG = DifferentiationConfig(hvp_mode="fd")


@dataclass(frozen=True)
class FieldEvaluation:
    """The simultaneous gradient at a point, with its squared norm.

    ``norm_sq / 2`` is the scalar the dynamics may or may not conserve;
    its gradient is ``thvp(game, w, xi)``.
    """

    w: Array
    xi: Array
    norm_sq: float


def simultaneous_gradient(game: Game, w) -> FieldEvaluation:
    """Stack the per-player gradients into the field xi(w).

    Non-finite entries are passed through; they signal overflow and are
    handled as divergence by the optimizer loop.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    xi = np.concatenate([game.player_gradient(i, w)
                         for i in range(game.num_players)])
    return FieldEvaluation(w=w, xi=xi, norm_sq=float(xi @ xi))


def _fd_step(config: DifferentiationConfig, w: Array) -> float:
    return config.fd_step_scale * (1.0 + float(np.max(np.abs(w), initial=0.0)))


def fd_gradient(f, w, step_scale: float = 1e-6) -> Array:
    """Central-difference gradient of a scalar function, the first-order
    oracle used to validate analytic gradients."""
    w = np.asarray(w, dtype=float).reshape(-1)
    h = step_scale * (1.0 + float(np.max(np.abs(w), initial=0.0)))
    out = np.empty_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        out[j] = (f(w + e) - f(w - e)) / (2.0 * h)
    return out


def hvp(game: Game, w, v, config: DifferentiationConfig = DEFAULT_CONFIG) -> Array:
    """Hessian-vector product H(w) v.

    The finite-difference path normalizes v before stepping so the step size
    stays meaningful for tiny or huge v; a zero v returns zero directly.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if config.hvp_mode == "analytic" and game.has_analytic_hessian:
        return game.analytic_hessian(w) @ v
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        return np.zeros_like(v)
    vhat = v / nrm
    h = _fd_step(config, w)
    xi_plus = simultaneous_gradient(game, w + h * vhat).xi
    xi_minus = simultaneous_gradient(game, w - h * vhat).xi
    return (xi_plus - xi_minus) * (nrm / (2.0 * h))


def thvp(game: Game, w, v, config: DifferentiationConfig = DEFAULT_CONFIG) -> Array:
    """Transposed Hessian-vector product H(w)' v.

    The finite-difference path differentiates the scalar ``<xi(w), v>``
    coordinate by coordinate: 2d field evaluations in total.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if config.hvp_mode == "analytic" and game.has_analytic_hessian:
        return game.analytic_hessian(w).T @ v
    if not np.any(v):
        return np.zeros_like(v)
    h = _fd_step(config, w)
    out = np.empty_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g_plus = float(simultaneous_gradient(game, w + e).xi @ v)
        g_minus = float(simultaneous_gradient(game, w - e).xi @ v)
        out[j] = (g_plus - g_minus) / (2.0 * h)
    return out


def sym_adjustment(game: Game, w,
                   config: DifferentiationConfig = DEFAULT_CONFIG) -> Array:
    """The antisymmetric-part product A' xi = (H' xi - H xi) / 2."""
    xi = simultaneous_gradient(game, w).xi
    return 0.5 * (thvp(game, w, xi, config) - hvp(game, w, xi, config))


def grad_hamiltonian(game: Game, w,
                     config: DifferentiationConfig = DEFAULT_CONFIG) -> Array:
    """Gradient of w -> |xi(w)|^2 / 2, which equals H' xi for any game."""
    xi = simultaneous_gradient(game, w).xi
    return thvp(game, w, xi, config)


def full_hessian(game: Game, w,
                 config: DifferentiationConfig = DEFAULT_CONFIG,
                 cap: int = 512) -> Array:
    """The full d x d game Hessian.

    Uses the analytic Hessian directly when present (and not overridden by
    fd mode); otherwise assembles column j as ``hvp(game, w, e_j)``, which is
    why the dimension is capped.
    """
    w = np.asarray(w, dtype=float).reshape(-1)
    if config.hvp_mode == "analytic" and game.has_analytic_hessian:
        return game.analytic_hessian(w)
    d = game.dim
    if d > cap:
        raise ValueError(f"dimension {d} exceeds the full-Hessian cap {cap}")
    cols = np.empty((d, d))
    eye = np.eye(d)
    for j in range(d):
        cols[:, j] = hvp(game, w, eye[:, j], config)
    return cols
