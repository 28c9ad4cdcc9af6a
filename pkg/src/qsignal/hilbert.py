"""Dense linear algebra over small multi-qubit Hilbert spaces.

States live in the computational basis with qubit 0 as the most
significant bit of the amplitude index, so the label ``x0 x1 ... x(n-1)``
reads left to right exactly like the integer ``int("x0x1...", 2)``.

The Psi-basis vectors ``(|x> + i|~x>)/sqrt(2)`` are never materialized as a
change-of-basis matrix. Each one touches only two computational amplitudes,
index ``x`` and its bitwise complement ``2**n - 1 - x``, which is the same
array position read back to front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 8
NORM_TOL = 1e-9
ALGEBRA_TOL = 1e-12
BRANCH_TOL = 1e-12

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_TWO_PI = 2.0 * np.pi


class InvariantViolation(ArithmeticError):
    """A numeric invariant (norm, trace, hermiticity, reality) was broken."""


class ZeroProbabilityBranch(ValueError):
    """Conditioning on a projector the state does not reach."""


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"number of qubits must be in 1..{MAX_QUBITS}, got {n}")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class UnitaryParams:
    """Angles ``(theta, alpha, beta)`` of a one-qubit SU(2) strategy."""

    theta: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        for name in ("theta", "alpha", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if not -ALGEBRA_TOL <= self.theta <= np.pi + ALGEBRA_TOL:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not -ALGEBRA_TOL <= v < _TWO_PI + ALGEBRA_TOL:
                raise ValueError(f"{name} must lie in [0, 2*pi), got {v}")

    @property
    def is_real(self) -> bool:
        """True for the classical-move family ``U(theta, 0, 0)``."""
        return self.alpha == 0.0 and self.beta == 0.0

    def matrix(self) -> np.ndarray:
        return su2_matrix(self)


IDENTITY = UnitaryParams()


def su2_matrix(p: UnitaryParams) -> np.ndarray:
    """Return the 2x2 matrix of ``U(theta, alpha, beta)``.

    ``[[e^{ia} cos(t/2), i e^{ib} sin(t/2)], [i e^{-ib} sin(t/2), e^{-ia} cos(t/2)]]``
    """
    return su2_matrices(np.array([p.theta]), np.array([p.alpha]), np.array([p.beta]))[0]


def su2_matrices(theta, alpha=None, beta=None) -> np.ndarray:
    """Vectorized :func:`su2_matrix`; returns an array of shape ``(G, 2, 2)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    alpha = np.zeros_like(theta) if alpha is None else np.atleast_1d(np.asarray(alpha, dtype=float))
    beta = np.zeros_like(theta) if beta is None else np.atleast_1d(np.asarray(beta, dtype=float))
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    out = np.empty((theta.size, 2, 2), dtype=complex)
    out[:, 0, 0] = np.exp(1j * alpha) * c
    out[:, 0, 1] = 1j * np.exp(1j * beta) * s
    out[:, 1, 0] = 1j * np.exp(-1j * beta) * s
    out[:, 1, 1] = np.exp(-1j * alpha) * c
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).ravel()
        n = int(round(np.log2(a.size))) if a.size else 0
        if a.size != 2**n:
            raise ValueError(f"amplitude count {a.size} is not a power of two")
        _check_n(n)
        if not np.all(np.isfinite(a)):
            raise InvariantViolation("state amplitudes must be finite")
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvariantViolation(f"state norm^2 is {norm2!r}, expected 1")
        object.__setattr__(self, "amps", _readonly(a))

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amps.size

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amps, other.amps))

    def psi_coefficients(self) -> np.ndarray:
        """Coordinates ``<Psi_x|state>`` for every label ``x``."""
        return psi_coefficients(self.amps)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amps, self.amps.conj()))


def psi_coefficients(amps: np.ndarray) -> np.ndarray:
    # <Psi_x| = (<x| - i<~x|)/sqrt(2)
    amps = np.asarray(amps)
    return (amps - 1j * amps[::-1]) * _SQRT_HALF


def from_psi_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`psi_coefficients` (computational amplitudes)."""
    coeffs = np.asarray(coeffs)
    return (coeffs + 1j * coeffs[::-1]) * _SQRT_HALF


def label(x: int, n: int) -> str:
    return format(x, f"0{n}b")


def psi_basis_state(bits: str | Sequence[int]) -> StateVector:
    """Return ``|Psi_x> = (|x> + i|~x>)/sqrt(2)`` for the bitstring ``x``."""
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bitstring must be nonempty and binary, got {bits!r}")
        digits = [int(b) for b in bits]
    else:
        digits = [int(b) for b in bits]
        if not digits or set(digits) - {0, 1}:
            raise ValueError(f"bitstring must be nonempty and binary, got {bits!r}")
    n = len(digits)
    _check_n(n)
    x = int("".join(map(str, digits)), 2)
    a = np.zeros(2**n, dtype=complex)
    a[x] += _SQRT_HALF
    a[2**n - 1 - x] += 1j * _SQRT_HALF
    return StateVector(a)


def _apply_matrices(amps: np.ndarray, mats: Sequence[np.ndarray | None]) -> np.ndarray:
    n = len(mats)
    psi = np.asarray(amps).reshape((2,) * n)
    for q, m in enumerate(mats):
        if m is None:
            continue
        psi = np.moveaxis(np.tensordot(m, psi, axes=([1], [q])), 0, q)
    return psi.reshape(-1)


def apply_local(state: StateVector, ops: Sequence[UnitaryParams]) -> StateVector:
    """Apply ``ops[0] (x) ops[1] (x) ... (x) ops[n-1]`` to ``state``."""
    if len(ops) != state.n_qubits:
        raise ValueError(f"expected {state.n_qubits} operators, got {len(ops)}")
    mats = [None if op == IDENTITY else su2_matrix(op) for op in ops]
    return StateVector(_apply_matrices(state.amps, mats))


def local_operator(ops: Sequence[UnitaryParams]) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix of a product of one-qubit operators."""
    m = np.array([[1.0 + 0j]])
    for op in ops:
        m = np.kron(m, su2_matrix(op))
    return m


@dataclass(frozen=True)
class PsiProjector:
    """Projector onto the span of ``|Psi_x>`` with some bits of ``x`` fixed.

    ``constraints`` holds ``(qubit_index, bit)`` pairs; qubits not mentioned
    are summed over.
    """

    n_qubits: int
    constraints: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        _check_n(self.n_qubits)
        cons = frozenset((int(q), int(b)) for q, b in self.constraints)
        qubits = [q for q, _ in cons]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"conflicting constraints {sorted(cons)}")
        for q, b in cons:
            if not 0 <= q < self.n_qubits or b not in (0, 1):
                raise ValueError(f"bad constraint ({q}, {b}) for {self.n_qubits} qubits")
        object.__setattr__(self, "constraints", cons)

    @classmethod
    def of(cls, n_qubits: int, fixed: dict[int, int] | Iterable[tuple[int, int]] = ()) -> "PsiProjector":
        items = fixed.items() if isinstance(fixed, dict) else fixed
        return cls(n_qubits, frozenset(items))

    @property
    def mask(self) -> np.ndarray:
        """Boolean membership over Psi labels ``x``."""
        x = np.arange(2**self.n_qubits)
        keep = np.ones(x.size, dtype=bool)
        for q, b in self.constraints:
            keep &= ((x >> (self.n_qubits - 1 - q)) & 1) == b
        return keep

    def complement_on(self, qubit: int) -> "PsiProjector":
        """Same projector with the bit on ``qubit`` negated."""
        d = dict(self.constraints)
        d[qubit] = 1 - d[qubit]
        return PsiProjector.of(self.n_qubits, d)

    def apply(self, amps: np.ndarray) -> np.ndarray:
        c = psi_coefficients(amps)
        return from_psi_coefficients(np.where(self.mask, c, 0.0))

    def matrix(self) -> np.ndarray:
        return _psi_diagonal_matrix(self.mask.astype(float))

    def __str__(self):
        if not self.constraints:
            return "P_{}"
        return "P_{" + ",".join(f"{b}@{q}" for q, b in sorted(self.constraints)) + "}"


def identity_projector(n_qubits: int) -> PsiProjector:
    return PsiProjector(n_qubits)


def _psi_diagonal_matrix(w: np.ndarray) -> np.ndarray:
    # sum_x w_x |Psi_x><Psi_x| assembled entrywise from the two-term kets
    dim = w.size
    m = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    bar = idx[::-1]
    m[idx, idx] += 0.5 * (w + w[::-1])
    m[bar, idx] += 0.5j * w
    m[idx, bar] += -0.5j * w
    return m


@dataclass(frozen=True)
class Observable:
    """Real-weighted sum of Psi-basis projectors."""

    n_qubits: int
    terms: tuple = ()

    def __post_init__(self):
        _check_n(self.n_qubits)
        terms = tuple((proj, float(w)) for proj, w in self.terms)
        for proj, w in terms:
            if proj.n_qubits != self.n_qubits:
                raise ValueError("projector dimension does not match observable")
            if not np.isfinite(w):
                raise ValueError(f"observable weight must be finite, got {w}")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def weights(self) -> np.ndarray:
        """Eigenvalue attached to each ``|Psi_x>`` (0 where no term covers it)."""
        w = np.zeros(self.dim)
        for proj, weight in self.terms:
            w += weight * proj.mask
        return w

    def matrix(self) -> np.ndarray:
        return _psi_diagonal_matrix(self.weights())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        n = rho.shape[0].bit_length() - 1
        if rho.shape[0] != 2**n:
            raise ValueError("density matrix dimension is not a power of two")
        _check_n(n)
        if not np.all(np.isfinite(rho)):
            raise InvariantViolation("density matrix entries must be finite")
        tr = np.trace(rho)
        if abs(tr - 1.0) > NORM_TOL:
            raise InvariantViolation(f"density matrix trace is {tr!r}, expected 1")
        if np.max(np.abs(rho - rho.conj().T)) > ALGEBRA_TOL:
            raise InvariantViolation("density matrix is not Hermitian")
        if np.linalg.eigvalsh(rho).min() < -NORM_TOL:
            raise InvariantViolation("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _readonly(rho))

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[StateVector]) -> "DensityMatrix":
        rho = sum(w * np.outer(s.amps, s.amps.conj()) for w, s in zip(weights, states))
        return cls(rho)

    def evolve(self, ops: Sequence[UnitaryParams]) -> "DensityMatrix":
        """``W rho W^dagger`` for the local product ``W`` of ``ops``."""
        if len(ops) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} operators, got {len(ops)}")
        w = local_operator(ops)
        rho = w @ self.entries @ w.conj().T
        # hermiticity drifts at the 1e-16 level per product
        return DensityMatrix(0.5 * (rho + rho.conj().T))

    def psi_diagonal(self) -> np.ndarray:
        """``<Psi_x|rho|Psi_x>`` for every label ``x``."""
        rho = self.entries
        d = np.diag(rho)
        x_xbar = np.diag(rho[:, ::-1])  # rho[x, ~x]
        xbar_x = np.diag(rho[::-1, :])  # rho[~x, x]
        return 0.5 * (d + d[::-1] + 1j * x_xbar - 1j * xbar_x)


def _check_dim(n_a: int, n_b: int) -> None:
    if n_a != n_b:
        raise ValueError(f"dimension mismatch: {n_a} vs {n_b} qubits")


def expectation(state: StateVector, obs: Observable) -> float:
    """``<state|M|state>``, computed in the Psi basis."""
    _check_dim(state.n_qubits, obs.n_qubits)
    c = state.psi_coefficients()
    return float(obs.weights() @ (c.real**2 + c.imag**2))


def project_prob(state: StateVector, proj: PsiProjector) -> float:
    _check_dim(state.n_qubits, proj.n_qubits)
    c = state.psi_coefficients()
    p = float(np.sum(np.abs(c[proj.mask]) ** 2))
    if p < -BRANCH_TOL or p > 1.0 + NORM_TOL:
        raise InvariantViolation(f"projection probability {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)


def post_measurement(state: StateVector, proj: PsiProjector) -> tuple[StateVector, float]:
    """Return the normalized state ``P|psi>/sqrt(p)`` together with ``p``."""
    p = project_prob(state, proj)
    if p <= BRANCH_TOL:
        raise ZeroProbabilityBranch(f"{proj} has probability {p:.3g} on this state")
    return StateVector(proj.apply(state.amps) / np.sqrt(p)), p


def density_expectation(rho: DensityMatrix, obs: Observable) -> float:
    """``tr(rho M)``."""
    _check_dim(rho.n_qubits, obs.n_qubits)
    val = complex(obs.weights() @ rho.psi_diagonal())
    if abs(val.imag) > NORM_TOL:
        raise InvariantViolation(f"tr(rho M) has imaginary part {val.imag:.3g}")
    return val.real


def psi_amplitudes(state: StateVector, tol: float = ALGEBRA_TOL) -> list[tuple[str, complex]]:
    """Nonzero Psi-basis amplitudes of ``state`` as ``(label, amplitude)``."""
    c = state.psi_coefficients()
    return [(label(x, state.n_qubits), complex(c[x])) for x in np.flatnonzero(np.abs(c) > tol)]
