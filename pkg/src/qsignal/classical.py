"""Classical two-type signaling game.

Chance draws type ``t1`` with probability ``p`` (else ``t2``). Player 1
sees her type and plays ``L`` or ``R``; player 2 sees only the action and
answers ``u`` or ``d``. Player 2 therefore has a *left* information set
(after ``L``) and a *right* one (after ``R``), each holding a ``t1`` node
(upper) and a ``t2`` node (lower).

Leaves are stored in the canonical order shared with the quantum model::

    (t1,L,u) (t1,L,d) (t2,L,u) (t2,L,d) (t1,R,u) (t1,R,d) (t2,R,u) (t2,R,d)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Sequence

import numpy as np

TYPES = ("t1", "t2")
P1_ACTIONS = ("L", "R")
P2_ACTIONS = ("u", "d")
P2_SETS = {"L": "left", "R": "right"}
INFO_SETS = ("t1", "t2", "left", "right")

LEAF_ORDER = tuple(
    (t, a1, a2) for a1 in P1_ACTIONS for t in TYPES for a2 in P2_ACTIONS
)

P1_STRATEGIES = tuple(a + b for a, b in product(P1_ACTIONS, repeat=2))
P2_STRATEGIES = tuple(a + b for a, b in product(P2_ACTIONS, repeat=2))

PAYOFF_TOL = 1e-12


@dataclass(frozen=True)
class SignalingSpec:
    """Chance probability of ``t1`` and the eight leaf payoff pairs."""

    p_chance: float
    leaves: tuple

    def __post_init__(self):
        if not 0.0 <= self.p_chance <= 1.0:
            raise ValueError(f"p_chance must lie in [0, 1], got {self.p_chance}")
        leaves = tuple((float(a), float(b)) for a, b in self.leaves)
        if len(leaves) != 8:
            raise ValueError(f"expected 8 leaf payoff pairs, got {len(leaves)}")
        if not np.all(np.isfinite(leaves)):
            raise ValueError("leaf payoffs must be finite")
        object.__setattr__(self, "leaves", leaves)

    def leaf(self, t: str, a1: str, a2: str) -> tuple[float, float]:
        return self.leaves[LEAF_ORDER.index((t, a1, a2))]

    def with_p(self, p: float) -> "SignalingSpec":
        return SignalingSpec(p, self.leaves)

    @property
    def type_probs(self) -> dict[str, float]:
        return {"t1": self.p_chance, "t2": 1.0 - self.p_chance}


@dataclass(frozen=True, order=True)
class PureProfile:
    """``p1 = (action at t1, action at t2)``, ``p2 = (action at left, at right)``."""

    p1: tuple
    p2: tuple

    def __post_init__(self):
        p1, p2 = tuple(self.p1), tuple(self.p2)
        if len(p1) != 2 or set(p1) - set(P1_ACTIONS):
            raise ValueError(f"bad player 1 strategy {self.p1!r}")
        if len(p2) != 2 or set(p2) - set(P2_ACTIONS):
            raise ValueError(f"bad player 2 strategy {self.p2!r}")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def parse(cls, text: str) -> "PureProfile":
        """Parse ``"RL,du"``."""
        s1, s2 = (part.strip() for part in text.split(","))
        return cls(tuple(s1), tuple(s2))

    @property
    def label(self) -> str:
        return "".join(self.p1) + "," + "".join(self.p2)

    def action(self, info_set: str) -> str:
        return {"t1": self.p1[0], "t2": self.p1[1], "left": self.p2[0], "right": self.p2[1]}[info_set]

    def response(self, a1: str) -> str:
        return self.p2[0] if a1 == "L" else self.p2[1]

    def __str__(self):
        return self.label


def all_profiles() -> list[PureProfile]:
    return [PureProfile(tuple(s1), tuple(s2)) for s1 in P1_STRATEGIES for s2 in P2_STRATEGIES]


@dataclass(frozen=True, eq=False)
class StrategicForm:
    """Two-player bimatrix; ``payoffs[i, j] = (u1, u2)``."""

    rows: tuple
    cols: tuple
    payoffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.payoffs, dtype=float)
        if a.shape != (len(self.rows), len(self.cols), 2):
            raise ValueError(f"payoff grid shape {a.shape} does not match labels")
        a.setflags(write=False)
        object.__setattr__(self, "payoffs", a)

    def entry(self, row: Hashable, col: Hashable) -> tuple[float, float]:
        u = self.payoffs[self.rows.index(row), self.cols.index(col)]
        return (float(u[0]), float(u[1]))


def pure_nash_indices(a: np.ndarray, b: np.ndarray, tol: float = PAYOFF_TOL) -> list[tuple[int, int]]:
    """Cells where neither player gains by deviating (weak inequalities)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    row_best = a >= a.max(axis=0, keepdims=True) - tol
    col_best = b >= b.max(axis=1, keepdims=True) - tol
    return [tuple(int(v) for v in ij) for ij in np.argwhere(row_best & col_best)]


def pure_nash(g: StrategicForm, tol: float = PAYOFF_TOL) -> list[tuple]:
    """Pure Nash equilibria as ``(row label, column label)`` in grid order."""
    return [(g.rows[i], g.cols[j]) for i, j in pure_nash_indices(g.payoffs[..., 0], g.payoffs[..., 1], tol)]


def profile_payoffs(spec: SignalingSpec, profile: PureProfile) -> tuple[float, float]:
    u = np.zeros(2)
    for t, a1 in zip(TYPES, profile.p1):
        u += spec.type_probs[t] * np.array(spec.leaf(t, a1, profile.response(a1)))
    return (float(u[0]), float(u[1]))


def behavioral_payoffs(
    spec: SignalingSpec, p1_first: Sequence[float], p2_first: Sequence[float]
) -> tuple[float, float]:
    """Expected payoffs when each information set randomizes independently.

    ``p1_first[k]`` is the probability of ``L`` at type ``k``;
    ``p2_first[k]`` the probability of ``u`` at the left (0) / right (1) set.
    """
    prob = {
        "t1": dict(zip(P1_ACTIONS, (p1_first[0], 1 - p1_first[0]))),
        "t2": dict(zip(P1_ACTIONS, (p1_first[1], 1 - p1_first[1]))),
        "left": dict(zip(P2_ACTIONS, (p2_first[0], 1 - p2_first[0]))),
        "right": dict(zip(P2_ACTIONS, (p2_first[1], 1 - p2_first[1]))),
    }
    u = np.zeros(2)
    for t, a1, a2 in LEAF_ORDER:
        w = spec.type_probs[t] * prob[t][a1] * prob[P2_SETS[a1]][a2]
        u += w * np.array(spec.leaf(t, a1, a2))
    return (float(u[0]), float(u[1]))


def normal_form(spec: SignalingSpec) -> StrategicForm:
    """Rows ``LL, LR, RL, RR``; columns ``uu, ud, du, dd``."""
    grid = np.zeros((4, 4, 2))
    for i, s1 in enumerate(P1_STRATEGIES):
        for j, s2 in enumerate(P2_STRATEGIES):
            grid[i, j] = profile_payoffs(spec, PureProfile(tuple(s1), tuple(s2)))
    return StrategicForm(P1_STRATEGIES, P2_STRATEGIES, grid)


def nash_profiles(spec: SignalingSpec) -> list[PureProfile]:
    return [PureProfile(tuple(r), tuple(c)) for r, c in pure_nash(normal_form(spec))]


def reach_probabilities(spec: SignalingSpec, profile: PureProfile) -> dict[str, float]:
    """``P(x)`` for the player 1 nodes ``t1, t2`` and player 2 nodes ``left.t1`` etc."""
    probs = spec.type_probs
    reach = {"t1": probs["t1"], "t2": probs["t2"]}
    for s in ("left", "right"):
        for t in TYPES:
            reach[f"{s}.{t}"] = 0.0
    for t, a1 in zip(TYPES, profile.p1):
        reach[f"{P2_SETS[a1]}.{t}"] += probs[t]
    return reach


def consistent_beliefs(spec: SignalingSpec, profile: PureProfile) -> tuple[float | None, float | None]:
    """Beliefs on the upper (``t1``) node of the left and right sets.

    ``None`` marks a set reached with probability zero, where consistency
    places no constraint.
    """
    reach = reach_probabilities(spec, profile)
    out = []
    for s in ("left", "right"):
        mass = reach[f"{s}.t1"] + reach[f"{s}.t2"]
        out.append(reach[f"{s}.t1"] / mass if mass > 0 else None)
    return tuple(out)


@dataclass(frozen=True)
class Assessment:
    """Pure profile plus beliefs ``b1`` (left set) and ``b2`` (right set)."""

    profile: PureProfile
    b1: float
    b2: float
    constrained: tuple = (True, True)

    def __post_init__(self):
        for name in ("b1", "b2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def belief(self, info_set: str) -> dict[str, float]:
        """Distribution over the nodes (types) of ``info_set``."""
        if info_set in ("t1", "t2"):
            return {info_set: 1.0}
        b = self.b1 if info_set == "left" else self.b2
        return {"t1": b, "t2": 1.0 - b}


@dataclass(frozen=True)
class SetVerdict:
    info_set: str
    action: str
    values: dict
    passed: bool

    @property
    def gap(self) -> float:
        return max(self.values.values()) - self.values[self.action]


def conditional_payoff(spec: SignalingSpec, assessment: Assessment, info_set: str, action: str) -> float:
    """Belief-weighted payoff from ``action`` at ``info_set``, rest of play fixed."""
    prof = assessment.profile
    if info_set in ("t1", "t2"):
        return spec.leaf(info_set, action, prof.response(action))[0]
    a1 = "L" if info_set == "left" else "R"
    return sum(mu * spec.leaf(t, a1, action)[1] for t, mu in assessment.belief(info_set).items())


def sequentially_rational(
    spec: SignalingSpec, assessment: Assessment, tol: float = PAYOFF_TOL
) -> dict[str, SetVerdict]:
    verdicts = {}
    for h in INFO_SETS:
        actions = P1_ACTIONS if h in ("t1", "t2") else P2_ACTIONS
        values = {a: conditional_payoff(spec, assessment, h, a) for a in actions}
        chosen = assessment.profile.action(h)
        verdicts[h] = SetVerdict(h, chosen, values, values[chosen] >= max(values.values()) - tol)
    return verdicts


@dataclass(frozen=True)
class PBECandidate:
    """Outcome of the weak-PBE test for one pure profile.

    ``vertex_verdicts`` maps each unconstrained player 2 set to its verdicts at
    beliefs 0 and 1; ``assessment`` is the accepted witness, if any.
    """

    profile: PureProfile
    beliefs: tuple
    assessment: Assessment | None
    verdicts: dict
    vertex_verdicts: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.assessment is not None


def analyze_pbe(spec: SignalingSpec, profile: PureProfile, tol: float = PAYOFF_TOL) -> PBECandidate:
    """Search a belief system making ``profile`` a weak PBE.

    With two actions per set the payoff difference is affine in the node
    belief, so an unconstrained belief only needs checking at 0 and 1.
    """
    b1, b2 = consistent_beliefs(spec, profile)
    forced = {"left": b1, "right": b2}
    chosen = {}
    vertex_verdicts = {}
    for s in ("left", "right"):
        if forced[s] is not None:
            chosen[s] = forced[s]
            continue
        vertex_verdicts[s] = {}
        for b in (0.0, 1.0):
            trial = Assessment(profile, b if s == "left" else 0.0, b if s == "right" else 0.0)
            vertex_verdicts[s][b] = sequentially_rational(spec, trial, tol)[s]
        good = [b for b, v in vertex_verdicts[s].items() if v.passed]
        chosen[s] = good[0] if good else 0.0
    ok_vertices = all(any(v.passed for v in vv.values()) for vv in vertex_verdicts.values())
    assessment = Assessment(profile, chosen["left"], chosen["right"], (b1 is not None, b2 is not None))
    verdicts = sequentially_rational(spec, assessment, tol)
    accepted = ok_vertices and all(v.passed for v in verdicts.values())
    return PBECandidate(profile, (b1, b2), assessment if accepted else None, verdicts, vertex_verdicts)


def weak_pbe(spec: SignalingSpec, tol: float = PAYOFF_TOL) -> list[tuple[Assessment, dict]]:
    """Pure weak PBE as ``(assessment, certificate)`` in profile order.

    The certificate records the per-set verdicts and which beliefs were free.
    """
    out = []
    for prof in all_profiles():
        cand = analyze_pbe(spec, prof, tol)
        if cand.accepted:
            cert = {"verdicts": cand.verdicts, "free_sets": tuple(cand.vertex_verdicts)}
            out.append((cand.assessment, cert))
    return out
