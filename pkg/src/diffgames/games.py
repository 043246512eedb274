"""Games: player partitions, losses with analytic gradients, and a catalog.

A game couples ``n`` players, each controlling one block of a flat parameter
vector ``w`` in ``R^d``, through per-player scalar losses.  Everything
downstream (simultaneous gradients, Hessian-vector products, adjusted
dynamics) needs only the losses, their per-player analytic gradients, and,
when available, a full analytic Hessian.

Games are immutable after construction and all evaluations are pure, so a
single game object can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Array = np.ndarray

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class PlayerPartition:
    """How a flat parameter vector of length d splits among n players.

    Parameters
    ----------
    sizes : tuple of int
        Number of parameters controlled by each player; all must be >= 1.
    """

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) == 0:
            raise ValueError("a game needs at least one player")
        if any(s < 1 for s in sizes):
            raise ValueError(f"player sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def num_players(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        """Total parameter dimension d."""
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start index of each player's block (prefix sums of sizes)."""
        out, acc = [], 0
        for s in self.sizes:
            out.append(acc)
            acc += s
        return tuple(out)

    def block(self, i: int) -> slice:
        """Index slice of player i's parameters inside the flat vector."""
        start = self.offsets[i]
        return slice(start, start + self.sizes[i])

    def split(self, w: Array) -> list[Array]:
        """Views of w, one per player, in player order."""
        return [w[self.block(i)] for i in range(self.num_players)]


def as_point(partition: PlayerPartition, values) -> Array:
    """Validate and return a parameter vector for the given partition.

    Raises ValueError on wrong length or non-finite entries.
    """
    w = np.asarray(values, dtype=float).reshape(-1)
    if w.shape != (partition.total,):
        raise ValueError(
            f"point has length {w.size}, partition needs {partition.total}"
        )
    if not np.all(np.isfinite(w)):
        raise ValueError("point has non-finite entries")
    return w


class Game:
    """An n-player game over R^d with analytic per-player gradients.

    Parameters
    ----------
    partition : PlayerPartition
    losses : sequence of callables
        ``losses[i](w) -> float``, the loss of player i at the full vector w.
    gradients : sequence of callables
        ``gradients[i](w) -> array of length sizes[i]``, the gradient of
        ``losses[i]`` with respect to player i's own block.
    hessian : callable, optional
        ``hessian(w) -> (d, d) array`` whose row-block i holds the second
        derivatives of ``losses[i]`` with respect to (block i, everything).
    """

    def __init__(self, partition, losses, gradients, hessian=None):
        n = partition.num_players
        if len(losses) != n or len(gradients) != n:
            raise ValueError(
                f"expected {n} losses and gradients, got "
                f"{len(losses)} and {len(gradients)}"
            )
        self.partition = partition
        self._losses = tuple(losses)
        self._gradients = tuple(gradients)
        self._hessian = hessian

    @property
    def num_players(self) -> int:
        return self.partition.num_players

    @property
    def dim(self) -> int:
        return self.partition.total

    def loss(self, i: int, w: Array) -> float:
        return float(self._losses[i](w))

    def loss_vector(self, w: Array) -> Array:
        """All player losses at w; entry i equals loss i.

        Non-finite entries are returned as-is and signal numerical overflow
        (treated as divergence by the optimizer loop).
        """
        return np.array([self._losses[i](w) for i in range(self.num_players)],
                        dtype=float)

    def player_gradient(self, i: int, w: Array) -> Array:
        """Gradient of player i's loss with respect to its own block."""
        g = np.asarray(self._gradients[i](w), dtype=float).reshape(-1)
        if g.size != self.partition.sizes[i]:
            raise ValueError(
                f"gradient of player {i} has length {g.size}, "
                f"expected {self.partition.sizes[i]}"
            )
        return g

    @property
    def has_analytic_hessian(self) -> bool:
        return self._hessian is not None

    def analytic_hessian(self, w: Array) -> Array:
        if self._hessian is None:
            raise ValueError("game has no analytic Hessian")
        return np.asarray(self._hessian(w), dtype=float)


def make_game(partition, losses, gradients, hessian=None) -> Game:
    """Build a Game, checking gradient shapes against the partition.

    The check evaluates each gradient at the origin, so the callables must be
    defined on all of R^d (they are for every game in this package).
    """
    game = Game(partition, losses, gradients, hessian)
    probe = np.zeros(partition.total)
    for i in range(partition.num_players):
        game.player_gradient(i, probe)  # raises on size mismatch
    return game


class QuadraticGame(Game):
    """Game with losses ``l_i(w) = 1/2 w' B_i w + b_i' w``.

    Each coefficient matrix ``B_i`` must be symmetric; the game Hessian is
    then constant in w, with row-block i equal to player i's rows of B_i.

    Parameters
    ----------
    partition : PlayerPartition
    coefficients : sequence of (d, d) arrays
        One symmetric matrix per player.
    linear : sequence of length-d arrays, optional
        One offset vector per player; defaults to all zeros.
    """

    def __init__(self, partition, coefficients, linear=None):
        n, d = partition.num_players, partition.total
        coeffs = []
        for i, b in enumerate(coefficients):
            b = np.array(b, dtype=float)
            if b.shape != (d, d):
                raise ValueError(f"coefficient matrix {i} is not {d}x{d}")
            scale = max(1.0, np.max(np.abs(b)))
            if np.max(np.abs(b - b.T)) > _SYM_TOL * scale:
                raise ValueError(f"coefficient matrix {i} is not symmetric")
            b.setflags(write=False)
            coeffs.append(b)
        if len(coeffs) != n:
            raise ValueError(f"expected {n} coefficient matrices")
        if linear is None:
            lin = [np.zeros(d) for _ in range(n)]
        else:
            lin = [np.array(v, dtype=float).reshape(-1) for v in linear]
            if len(lin) != n or any(v.size != d for v in lin):
                raise ValueError("linear terms must be n vectors of length d")
        for v in lin:
            v.setflags(write=False)

        hessian = np.vstack([coeffs[i][partition.block(i), :]
                             for i in range(n)])
        hessian.setflags(write=False)
        offset = np.concatenate([lin[i][partition.block(i)]
                                 for i in range(n)])
        offset.setflags(write=False)

        def loss_fn(i):
            return lambda w: 0.5 * float(w @ (coeffs[i] @ w)) + float(lin[i] @ w)

        def grad_fn(i):
            blk = partition.block(i)
            return lambda w: (coeffs[i] @ w + lin[i])[blk]

        super().__init__(
            partition,
            [loss_fn(i) for i in range(n)],
            [grad_fn(i) for i in range(n)],
            hessian=lambda w: hessian,
        )
        self._coefficients = tuple(coeffs)
        self._linear = tuple(lin)
        self._hessian_matrix = hessian
        self._offset = offset

    @property
    def coefficients(self) -> tuple[Array, ...]:
        return self._coefficients

    @property
    def linear_terms(self) -> tuple[Array, ...]:
        return self._linear

    @property
    def hessian_matrix(self) -> Array:
        """The constant game Hessian (not symmetric in general)."""
        return self._hessian_matrix

    @property
    def gradient_offset(self) -> Array:
        """Constant c in xi(w) = H w + c."""
        return self._offset


def quadratic_game_from_hessian(partition, hessian, offset=None) -> QuadraticGame:
    """Build a quadratic game whose game Hessian equals ``hessian`` exactly.

    The diagonal blocks of ``hessian`` must be symmetric (they are second
    derivatives of a single loss in its own variables); off-diagonal blocks
    are free, which is what makes the game Hessian non-symmetric in general.
    ``offset`` is the constant part of the first-order field, split among the
    players by block.
    """
    d = partition.total
    h = np.asarray(hessian, dtype=float)
    if h.shape != (d, d):
        raise ValueError(f"hessian is not {d}x{d}")
    coeffs, linear = [], []
    for i in range(partition.num_players):
        blk = partition.block(i)
        diag = h[blk, blk]
        scale = max(1.0, np.max(np.abs(h)))
        if np.max(np.abs(diag - diag.T)) > _SYM_TOL * scale:
            raise ValueError(
                f"diagonal block {i} of the hessian must be symmetric"
            )
        b = np.zeros((d, d))
        b[blk, :] = h[blk, :]
        b[:, blk] = h[blk, :].T
        coeffs.append(b)
        v = np.zeros(d)
        if offset is not None:
            v[blk] = np.asarray(offset, dtype=float)[blk]
        linear.append(v)
    return QuadraticGame(partition, coeffs, linear)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    summary: str
    defaults: dict
    build: Callable[..., QuadraticGame]


def _zeros(k):
    return np.zeros((k, k))


def _build_example1(dim=2, payoff=None):
    """Zero-sum bilinear bimatrix game; the field rotates around the origin."""
    a = np.eye(int(dim)) if payoff is None else np.atleast_2d(
        np.asarray(payoff, dtype=float))
    dx, dy = a.shape
    b1 = np.block([[_zeros(dx), a], [a.T, _zeros(dy)]])
    return QuadraticGame(PlayerPartition((dx, dy)), [b1, -b1])


def _build_example2(dim=1, p=None, q=None):
    """General bilinear bimatrix game with separate payoff matrices."""
    pm = np.eye(int(dim)) if p is None else np.atleast_2d(np.asarray(p, float))
    qm = np.eye(int(dim)) if q is None else np.atleast_2d(np.asarray(q, float))
    if pm.shape != qm.shape:
        raise ValueError("payoff matrices must share a shape")
    dx, dy = pm.shape
    b1 = np.block([[_zeros(dx), pm], [pm.T, _zeros(dy)]])
    b2 = np.block([[_zeros(dx), qm], [qm.T, _zeros(dy)]])
    return QuadraticGame(PlayerPartition((dx, dy)), [b1, b2])


def _build_example3(a=1.0, b=1.0):
    """Bilinear game with equilibrium shifted to (a, b); purely antisymmetric
    Hessian, losses do not sum to zero unless a = b = 0."""
    b1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    b2 = -b1
    lin1 = np.array([-float(b), 0.0])
    lin2 = np.array([0.0, float(a)])
    return QuadraticGame(PlayerPartition((1, 1)), [b1, b2], [lin1, lin2])


def _build_example4():
    """Sign-flipped quadratic pair: zero-sum, yet simultaneous descent is
    plain gradient descent on x^2 - y^2."""
    b1 = 2.0 * np.eye(2)
    return QuadraticGame(PlayerPartition((1, 1)), [b1, -b1])


def _build_example5(kappa=10.0):
    """Two players minimizing the same concave quadratic -kappa/2 |w|^2."""
    kappa = float(kappa)
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    b = -kappa * np.eye(2)
    return QuadraticGame(PlayerPartition((1, 1)), [b, b])


def _build_example6(epsilon=0.1):
    """Weak repellor at the origin coupled to a strong rotation."""
    eps = float(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    b1 = np.array([[-eps, -1.0], [-1.0, 0.0]])
    b2 = np.array([[0.0, 1.0], [1.0, -eps]])
    return QuadraticGame(PlayerPartition((1, 1)), [b1, b2])


def _build_example7():
    """Coupled quadratics whose equilibrium is a minimum for each player
    separately but a saddle of the joint potential."""
    b1 = np.array([[1.0, 2.0], [2.0, 0.0]])
    b2 = np.array([[0.0, 2.0], [2.0, 1.0]])
    return QuadraticGame(PlayerPartition((1, 1)), [b1, b2])


def _build_fig3(coupling=10.0):
    """Weak attractor coupled to a strong rotational force."""
    c = float(coupling)
    b1 = np.array([[1.0, c], [c, 0.0]])
    b2 = np.array([[0.0, -c], [-c, 1.0]])
    return QuadraticGame(PlayerPartition((1, 1)), [b1, b2])


def _build_fig4(dim=1):
    """Zero-sum bilinear game +/- w1'w2 with configurable player dimension."""
    return _build_example1(dim=int(dim))


def _build_fig7(epsilon=0.01):
    """Four one-parameter players, pairwise zero-sum couplings, epsilon
    self-damping on each player."""
    eps = float(epsilon)
    if eps < 0:
        raise ValueError(f"epsilon must be nonnegative, got {eps}")
    coeffs = []
    for i in range(4):
        b = np.zeros((4, 4))
        b[i, i] = eps
        for j in range(4):
            if j == i:
                continue
            b[i, j] = b[j, i] = 1.0 if j > i else -1.0
        coeffs.append(b)
    return QuadraticGame(PlayerPartition((1, 1, 1, 1)), coeffs)


CATALOG: dict[str, CatalogEntry] = {
    e.name: e for e in [
        CatalogEntry(
            "example1",
            "zero-sum bilinear bimatrix game (cycling field)",
            {"dim": 2, "payoff": None}, _build_example1),
        CatalogEntry(
            "example2",
            "general bilinear bimatrix game with payoff matrices p, q",
            {"dim": 1, "p": None, "q": None}, _build_example2),
        CatalogEntry(
            "example3",
            "bilinear game with equilibrium shifted to (a, b); not zero-sum",
            {"a": 1.0, "b": 1.0}, _build_example3),
        CatalogEntry(
            "example4",
            "zero-sum pair +/-(x^2 + y^2); gradient flow on x^2 - y^2",
            {}, _build_example4),
        CatalogEntry(
            "example5",
            "both players minimize the concave -kappa/2 (x^2 + y^2)",
            {"kappa": 10.0}, _build_example5),
        CatalogEntry(
            "example6",
            "weak repellor at the origin with strong rotation",
            {"epsilon": 0.1}, _build_example6),
        CatalogEntry(
            "example7",
            "per-player minimum that is a saddle of the joint potential",
            {}, _build_example7),
        CatalogEntry(
            "fig3_weak_attractor",
            "weak attractor coupled to a strong rotational force",
            {"coupling": 10.0}, _build_fig3),
        CatalogEntry(
            "fig4_bilinear",
            "zero-sum bilinear game +/- w1'w2, per-player dimension dim",
            {"dim": 1}, _build_fig4),
        CatalogEntry(
            "fig7_four_player",
            "four scalar players, pairwise zero-sum couplings, epsilon damping",
            {"epsilon": 0.01}, _build_fig7),
    ]
}


def catalog_entries() -> list[CatalogEntry]:
    return list(CATALOG.values())


def catalog_game(name: str, **params) -> QuadraticGame:
    """Build a catalog game by name.

    Raises ValueError for unknown names, unknown parameters, or parameter
    values outside their documented ranges.
    """
    entry = CATALOG.get(name)
    if entry is None:
        known = ", ".join(sorted(CATALOG))
        raise ValueError(f"unknown game {name!r}; known games: {known}")
    unknown = set(params) - set(entry.defaults)
    if unknown:
        raise ValueError(
            f"unknown parameter(s) {sorted(unknown)} for game {name!r}; "
            f"accepted: {sorted(entry.defaults)}"
        )
    return entry.build(**params)
