"""Five-qubit quantum scheme for the signaling game.

Qubit labels follow ``|Psi_{x1 x2 x3 x4 x5}>``: ``x1`` belongs to the chance
mover, ``x2``/``x3`` are player 1's actions at types ``t1``/``t2`` and
``x4``/``x5`` are player 2's responses at the left/right information sets.
Array positions are the labels minus one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import classical
from .classical import LEAF_ORDER, SignalingSpec, StrategicForm, pure_nash_indices
from .hilbert import (
    Observable,
    PsiProjector,
    StateVector,
    UnitaryParams,
    apply_local,
    expectation,
    psi_basis_state,
)

N_QUBITS = 5
PURE_THETAS = (0.0, np.pi)


class Owner(enum.Enum):
    CHANCE = "chance"
    PLAYER1 = "player1"
    PLAYER2 = "player2"


class ParamMode(enum.Enum):
    THETA_ONLY = "theta"
    FULL_SU2 = "su2"


_XI = {1: Owner.CHANCE, 2: Owner.PLAYER1, 3: Owner.PLAYER1, 4: Owner.PLAYER2, 5: Owner.PLAYER2}


def xi(j: int) -> Owner:
    """Owner of the qubit with 1-based label ``j``."""
    if j not in _XI:
        raise ValueError(f"qubit label must be in 1..5, got {j}")
    return _XI[j]


def owned_qubits(owner: Owner) -> tuple[int, ...]:
    """0-based positions of the qubits ``owner`` acts on."""
    return tuple(j - 1 for j, o in _XI.items() if o is owner)


def proj(fixed: dict[int, int]) -> PsiProjector:
    """Psi projector from a ``{1-based label: bit}`` map."""
    return PsiProjector.of(N_QUBITS, {j - 1: b for j, b in fixed.items()})


def _leaf_projector(t: str, a1: str, a2: str) -> PsiProjector:
    x1 = 0 if t == "t1" else 1
    own = 2 if t == "t1" else 3
    resp = 4 if a1 == "L" else 5
    return proj({1: x1, own: int(a1 == "R"), resp: int(a2 == "d")})


# P_{0_1 0_2 0_4}, P_{0_1 0_2 1_4}, P_{1_1 0_3 0_4}, ..., P_{1_1 1_3 1_5}
LEAF_PROJECTORS = tuple(_leaf_projector(*leaf) for leaf in LEAF_ORDER)


def payoff_observable(spec: SignalingSpec, player: int) -> Observable:
    """``M_player = sum_k m^player_k P_k`` over the eight end-node projectors."""
    if player not in (1, 2):
        raise ValueError(f"player must be 1 or 2, got {player}")
    return Observable(N_QUBITS, tuple((p, leaf[player - 1]) for p, leaf in zip(LEAF_PROJECTORS, spec.leaves)))


@dataclass(frozen=True)
class QProfile:
    """Player 1 operators on qubits 2, 3 and player 2 operators on qubits 4, 5."""

    p1: tuple
    p2: tuple

    def __post_init__(self):
        for name in ("p1", "p2"):
            ops = tuple(getattr(self, name))
            if len(ops) != 2 or not all(isinstance(o, UnitaryParams) for o in ops):
                raise ValueError(f"{name} must hold two UnitaryParams")
            object.__setattr__(self, name, ops)

    @classmethod
    def from_thetas(cls, t2: float, t3: float, t4: float, t5: float) -> "QProfile":
        return cls((UnitaryParams(t2), UnitaryParams(t3)), (UnitaryParams(t4), UnitaryParams(t5)))

    @property
    def ops(self) -> tuple[UnitaryParams, ...]:
        return self.p1 + self.p2

    @property
    def thetas(self) -> tuple[float, ...]:
        return tuple(op.theta for op in self.ops)

    def player_ops(self, owner: Owner) -> tuple[UnitaryParams, ...]:
        return self.p1 if owner is Owner.PLAYER1 else self.p2

    def classical(self) -> classical.PureProfile:
        """Classical pure profile for a ``theta in {0, pi}`` profile (0 -> L/u)."""
        if not all(op.is_real and op.theta in PURE_THETAS for op in self.ops):
            raise ValueError("profile is not a pure classical-equivalent profile")
        p1 = tuple("L" if op.theta == 0.0 else "R" for op in self.p1)
        p2 = tuple("u" if op.theta == 0.0 else "d" for op in self.p2)
        return classical.PureProfile(p1, p2)

    @classmethod
    def from_classical(cls, profile: classical.PureProfile) -> "QProfile":
        t = [0.0 if a in ("L", "u") else np.pi for a in profile.p1 + profile.p2]
        return cls.from_thetas(*t)

    def __str__(self):
        return "|".join(_fmt_theta(op.theta) if op.is_real else _fmt_op(op) for op in self.ops)


def _fmt_theta(t: float) -> str:
    if t == 0.0:
        return "0"
    if t == np.pi:
        return "pi"
    return f"{t:.6g}"


def _fmt_op(op: UnitaryParams) -> str:
    return f"U({op.theta:.6g},{op.alpha:.6g},{op.beta:.6g})"


@dataclass(frozen=True)
class QSchemeConfig:
    """Leaf payoffs, the commonly known chance operator and player operator sets."""

    spec: SignalingSpec
    chance: UnitaryParams
    modes: tuple = (ParamMode.THETA_ONLY, ParamMode.THETA_ONLY)

    def __post_init__(self):
        modes = tuple(ParamMode(m) for m in self.modes)
        if len(modes) != 2:
            raise ValueError("need one parameter mode per player")
        object.__setattr__(self, "modes", modes)

    def mode(self, owner: Owner) -> ParamMode:
        return self.modes[0] if owner is Owner.PLAYER1 else self.modes[1]

    def check_profile(self, profile: QProfile) -> None:
        for owner in (Owner.PLAYER1, Owner.PLAYER2):
            if self.mode(owner) is ParamMode.THETA_ONLY and not all(op.is_real for op in profile.player_ops(owner)):
                raise ValueError(f"{owner.value} is restricted to U(theta, 0, 0)")

    def observable(self, player: int) -> Observable:
        return payoff_observable(self.spec, player)


def q_final_state(config: QSchemeConfig, profile: QProfile) -> StateVector:
    config.check_profile(profile)
    return apply_local(psi_basis_state("0" * N_QUBITS), (config.chance,) + profile.ops)


def q_payoffs(config: QSchemeConfig, profile: QProfile) -> tuple[float, float]:
    final = q_final_state(config, profile)
    return (expectation(final, config.observable(1)), expectation(final, config.observable(2)))


GRID_LABELS = tuple(product(PURE_THETAS, repeat=2))  # (0,0), (0,pi), (pi,0), (pi,pi)


def q_normal_form(config: QSchemeConfig) -> StrategicForm:
    """4x4 bimatrix over ``theta in {0, pi}`` on every player qubit.

    Rows are ``(theta2, theta3)`` and columns ``(theta4, theta5)`` in the
    order ``(0,0), (0,pi), (pi,0), (pi,pi)``, i.e. ``LL, LR, RL, RR``.
    """
    if config.modes != (ParamMode.THETA_ONLY, ParamMode.THETA_ONLY):
        raise ValueError("the quantum normal form requires theta-only players")
    grid = np.zeros((4, 4, 2))
    for i, r in enumerate(GRID_LABELS):
        for j, c in enumerate(GRID_LABELS):
            grid[i, j] = q_payoffs(config, QProfile.from_thetas(*r, *c))
    return StrategicForm(GRID_LABELS, GRID_LABELS, grid)


def q_pure_nash(config: QSchemeConfig, tol: float = 1e-9) -> list[QProfile]:
    g = q_normal_form(config)
    return [
        QProfile.from_thetas(*g.rows[i], *g.cols[j])
        for i, j in pure_nash_indices(g.payoffs[..., 0], g.payoffs[..., 1], tol)
    ]


def all_pure_qprofiles() -> list[QProfile]:
    return [QProfile.from_thetas(*r, *c) for r in GRID_LABELS for c in GRID_LABELS]
