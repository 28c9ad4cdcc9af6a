"""Generalized EWL scheme for n-player games with two actions per player.

Each player owns one qubit of ``|Psi_{0...0}>``; player ``i`` measures the
observable ``sum_x m^i_x |Psi_x><Psi_x|`` on the final state.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .hilbert import (
    ALGEBRA_TOL,
    Observable,
    PsiProjector,
    StateVector,
    UnitaryParams,
    apply_local,
    expectation,
    psi_basis_state,
)


def bitstrings(n: int) -> list[str]:
    """All length-``n`` bitstrings in lexicographic order."""
    return ["".join(bits) for bits in product("01", repeat=n)]


@dataclass(frozen=True)
class EwlScheme:
    """Payoff table ``m^i_x`` keyed by the outcome bitstring ``x``."""

    n_players: int
    payoffs: Mapping[str, tuple]

    def __post_init__(self):
        table = {}
        for x in bitstrings(self.n_players):
            if x not in self.payoffs:
                raise ValueError(f"missing payoffs for outcome {x}")
            row = tuple(float(v) for v in self.payoffs[x])
            if len(row) != self.n_players:
                raise ValueError(f"outcome {x} needs {self.n_players} payoffs, got {len(row)}")
            if not all(np.isfinite(row)):
                raise ValueError(f"payoffs for outcome {x} must be finite")
            table[x] = row
        extra = set(self.payoffs) - set(table)
        if extra:
            raise ValueError(f"unexpected outcomes {sorted(extra)}")
        object.__setattr__(self, "payoffs", table)

    @classmethod
    def from_rows(cls, n_players: int, rows: Sequence[Sequence[float]]) -> "EwlScheme":
        """Build from payoff rows listed in lexicographic outcome order."""
        keys = bitstrings(n_players)
        if len(rows) != len(keys):
            raise ValueError(f"expected {len(keys)} payoff rows, got {len(rows)}")
        return cls(n_players, dict(zip(keys, rows)))

    def observable(self, player: int) -> Observable:
        """``M_player`` as a sum of rank-one Psi projectors (0-based player)."""
        if not 0 <= player < self.n_players:
            raise ValueError(f"player index {player} out of range")
        terms = []
        for x, row in self.payoffs.items():
            proj = PsiProjector.of(self.n_players, {q: int(b) for q, b in enumerate(x)})
            terms.append((proj, row[player]))
        return Observable(self.n_players, tuple(terms))


@dataclass(frozen=True)
class BehavioralStrategy:
    """Probability ``p`` of the first action at a two-action information set."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"behavioral probability must lie in [0, 1], got {self.p}")

    @property
    def distribution(self) -> tuple[float, float]:
        return (self.p, 1.0 - self.p)


def behavioral_of_theta(theta: float) -> BehavioralStrategy:
    """Classical strategy induced by ``U(theta, 0, 0)``: ``p = cos^2(theta/2)``."""
    if not -ALGEBRA_TOL <= theta <= np.pi + ALGEBRA_TOL:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    p = float(np.cos(theta / 2.0) ** 2)
    return BehavioralStrategy(min(max(p, 0.0), 1.0))


def ewl_final_state(scheme: EwlScheme, params: Sequence[UnitaryParams]) -> StateVector:
    if len(params) != scheme.n_players:
        raise ValueError(f"expected {scheme.n_players} strategies, got {len(params)}")
    return apply_local(psi_basis_state("0" * scheme.n_players), params)


def ewl_payoffs(scheme: EwlScheme, params: Sequence[UnitaryParams]) -> list[float]:
    """Expected measurement outcome ``E_i`` for every player."""
    final = ewl_final_state(scheme, params)
    return [expectation(final, scheme.observable(i)) for i in range(scheme.n_players)]
