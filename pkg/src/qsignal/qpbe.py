"""Perfect-Bayesian-type analysis of the quantum signaling game.

Before moving, a player measures the projectors that identify the nodes of
her information set. The Born weights of those outcomes form her
Bayesian-consistent belief, the post-measurement states (mixed with those
weights) are what she faces, and her prescribed operators must maximize
her payoff observable on that state over her own operators.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .hilbert import (
    BRANCH_TOL,
    IDENTITY,
    NORM_TOL,
    DensityMatrix,
    InvariantViolation,
    Observable,
    PsiProjector,
    StateVector,
    UnitaryParams,
    ZeroProbabilityBranch,
    apply_local,
    post_measurement,
    project_prob,
    psi_basis_state,
    su2_matrices,
)
from .qsignaling import (
    N_QUBITS,
    Owner,
    ParamMode,
    QProfile,
    QSchemeConfig,
    all_pure_qprofiles,
    owned_qubits,
    proj,
    q_payoffs,
    q_pure_nash,
)
from .search import Interval, golden_section_max, runs_to_intervals, snap_points

OPTIMALITY_TOL = 1e-7
DEFAULT_GRID = 513
DEFAULT_SU2_GRID = 9


class OffPath(ZeroProbabilityBranch):
    """Every node of the information set has zero probability."""


@dataclass(frozen=True)
class QInfoSet:
    """Nodes are identified by mutually orthogonal Psi projectors."""

    name: str
    owner: Owner
    conditioning: tuple
    acting_qubits: tuple

    def __post_init__(self):
        masks = [p.mask for p in self.conditioning]
        for i in range(len(masks)):
            for j in range(i + 1, len(masks)):
                if np.any(masks[i] & masks[j]):
                    raise ValueError(f"conditioning projectors of {self.name} overlap")
        if not set(self.acting_qubits) <= set(owned_qubits(self.owner)):
            raise ValueError(f"{self.name} acts on qubits not owned by {self.owner.value}")


SCOPES = ("pair", "single")


def signaling_info_sets(scope: str = "pair") -> tuple[QInfoSet, ...]:
    """The four information sets of the quantum signaling game.

    ``scope="pair"`` lets the mover deviate on both of her qubits;
    ``"single"`` only on the qubit of the action taken at this set, with the
    other one held at its prescribed operator.
    """
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
    pair = scope == "pair"
    p1, p2 = owned_qubits(Owner.PLAYER1), owned_qubits(Owner.PLAYER2)
    return (
        QInfoSet("t1", Owner.PLAYER1, (proj({1: 0}),), p1 if pair else (1,)),
        QInfoSet("t2", Owner.PLAYER1, (proj({1: 1}),), p1 if pair else (2,)),
        QInfoSet("left", Owner.PLAYER2, (proj({1: 0, 2: 0}), proj({1: 1, 3: 0})), p2 if pair else (3,)),
        QInfoSet("right", Owner.PLAYER2, (proj({1: 0, 2: 1}), proj({1: 1, 3: 1})), p2 if pair else (4,)),
    )


def _owner_player(owner: Owner) -> int:
    return 1 if owner is Owner.PLAYER1 else 2


def pre_move_state(config: QSchemeConfig, profile: QProfile, info_set: QInfoSet) -> StateVector:
    """Chance and the other player act; the owner's qubits stay untouched."""
    config.check_profile(profile)
    mine = set(owned_qubits(info_set.owner))
    ops = [config.chance] + list(profile.ops)
    ops = [IDENTITY if q in mine else op for q, op in enumerate(ops)]
    return apply_local(psi_basis_state("0" * N_QUBITS), ops)


@dataclass(frozen=True)
class QBelief:
    """Normalized node weights and the post-measurement state of each node.

    ``probabilities`` are the unnormalized Born weights; ``reach`` their sum.
    """

    weights: tuple
    posteriors: tuple
    probabilities: tuple
    reach: float


def q_beliefs(state: StateVector, info_set: QInfoSet) -> QBelief:
    probs = [project_prob(state, p) for p in info_set.conditioning]
    reach = sum(probs)
    if reach <= BRANCH_TOL:
        raise OffPath(f"information set {info_set.name} is reached with probability {reach:.3g}")
    posts = []
    for p, pr in zip(info_set.conditioning, probs):
        posts.append(post_measurement(state, p)[0] if pr > BRANCH_TOL else None)
    weights = tuple(pr / reach for pr in probs)
    return QBelief(weights, tuple(posts), tuple(probs), reach)


def conditional_mixed(belief: QBelief) -> DensityMatrix:
    pairs = [(w, s) for w, s in zip(belief.weights, belief.posteriors) if s is not None]
    total = sum(w for w, _ in pairs)
    return DensityMatrix.mixture([w / total for w, _ in pairs], [s for _, s in pairs])


# -- batched objective -------------------------------------------------------
#
# For W = U_a (x) U_b (x) 1 on the acting qubits,
#   tr(M W rho W^dag) = sum T[j_a, j_b] R_a[j_a] R_b[j_b],
# with R[y, y', z, z'] = U[y', z] conj(U[y, z']) and T the contraction of M and
# rho over every qubit outside the acting set.


def _contract_tensor(rho: np.ndarray, m: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    letters = string.ascii_letters
    y = list(letters[0:n])
    yp = list(letters[n : 2 * n])
    z = list(letters[2 * n : 3 * n])
    zp = list(letters[3 * n : 4 * n])
    for k in range(n):
        if k not in qubits:
            yp[k] = z[k]
            y[k] = zp[k]
    out = "".join(y[q] + yp[q] + z[q] + zp[q] for q in qubits)
    spec = f"{''.join(y + yp)},{''.join(z + zp)}->{out}"
    t = np.einsum(spec, m.reshape((2,) * (2 * n)), rho.reshape((2,) * (2 * n)), optimize=True)
    return t.reshape((16,) * len(qubits))


def _r_batch(mats: np.ndarray) -> np.ndarray:
    return np.einsum("gbc,gad->gabcd", mats, mats.conj()).reshape(len(mats), 16)


def _values(t: np.ndarray, batches: Sequence[np.ndarray]) -> np.ndarray:
    if len(batches) == 1:
        v = _r_batch(batches[0]) @ t
    else:
        v = _r_batch(batches[0]) @ t @ _r_batch(batches[1]).T
    if np.max(np.abs(v.imag), initial=0.0) > NORM_TOL:
        raise InvariantViolation("payoff objective acquired an imaginary part")
    return v.real


def _as_rho(target) -> DensityMatrix:
    return target.density() if isinstance(target, StateVector) else target


def _params_batch(params: Sequence[UnitaryParams]) -> np.ndarray:
    return su2_matrices([p.theta for p in params], [p.alpha for p in params], [p.beta for p in params])


class Objective:
    """``params -> tr(M W rho W^dag)`` for operators on ``qubits`` only."""

    def __init__(self, target, obs: Observable, qubits: Sequence[int]):
        rho = _as_rho(target)
        if len(qubits) not in (1, 2) or len(set(qubits)) != len(qubits):
            raise ValueError("best responses are over one or two distinct qubits")
        self.qubits = tuple(qubits)
        self.t = _contract_tensor(rho.entries, obs.matrix(), rho.n_qubits, self.qubits)

    def grid(self, batches: Sequence[np.ndarray]) -> np.ndarray:
        return _values(self.t, batches)

    def __call__(self, params: Sequence[UnitaryParams]) -> float:
        return float(self.grid([_params_batch([p]) for p in params]).ravel()[0])

    def thetas(self, *thetas: float) -> float:
        return float(self.grid([su2_matrices([t]) for t in thetas]).ravel()[0])


def evaluate(target, obs: Observable, qubits: Sequence[int], params: Sequence[UnitaryParams]) -> float:
    """Payoff after applying ``params`` to ``qubits`` of a state or mixed state."""
    return Objective(target, obs, qubits)(params)


@dataclass(frozen=True)
class BestResponse:
    """Maximum of the objective and where it is attained.

    ``argmax`` holds, per acting qubit, the theta intervals on which the
    objective is within ``tol`` of the maximum (grid resolution, with isolated
    points replaced by the refined optimum). ``product`` tells whether that
    near-optimal set is the Cartesian product of the per-qubit intervals.
    Full SU(2) searches only report the witness.
    """

    max_value: float
    witness: tuple
    argmax: tuple | None
    product: bool
    qubits: tuple

    def describe(self) -> str:
        if self.argmax is None:
            return " x ".join(f"U({p.theta:.6g},{p.alpha:.6g},{p.beta:.6g})" for p in self.witness)
        return " x ".join(" u ".join(str(iv) for iv in ivs) for ivs in self.argmax)


def best_response(
    target,
    obs: Observable,
    acting_qubits: Sequence[int],
    mode: ParamMode = ParamMode.THETA_ONLY,
    grid: int = DEFAULT_GRID,
    tol: float = OPTIMALITY_TOL,
    su2_grid: int = DEFAULT_SU2_GRID,
) -> BestResponse:
    """Maximize ``<M>`` over the owner's operators on ``acting_qubits``."""
    obj = Objective(target, obs, acting_qubits)
    if ParamMode(mode) is ParamMode.FULL_SU2:
        return _best_su2(obj, su2_grid)
    return _best_theta(obj, grid, tol)


def _best_theta(obj: Objective, grid: int, tol: float) -> BestResponse:
    if grid < 3:
        raise ValueError("theta grid needs at least 3 points")
    thetas = np.linspace(0.0, np.pi, grid)
    step = thetas[1] - thetas[0]
    mats = su2_matrices(thetas)
    k = len(obj.qubits)
    values = obj.grid([mats] * k)
    best = np.unravel_index(int(np.argmax(values)), values.shape)
    x = [float(thetas[i]) for i in best]
    fx = float(values[best])

    def bracket(c):
        return max(c - step, 0.0), min(c + step, np.pi)

    if k == 1:
        x0, f0 = golden_section_max(lambda t: obj.thetas(t), *bracket(x[0]))
        if f0 > fx:
            x, fx = [x0], f0
    else:
        for _ in range(50):
            improved = 0.0
            for axis in range(2):
                def f(t, axis=axis):
                    trial = list(x)
                    trial[axis] = t
                    return obj.thetas(*trial)
                t_new, f_new = golden_section_max(f, *bracket(x[axis]))
                if f_new > fx:
                    improved = max(improved, f_new - fx)
                    x[axis], fx = t_new, f_new
            if improved < 1e-15:
                break

    near = values >= fx - tol
    if k == 1:
        argmax = (tuple(snap_points(runs_to_intervals(thetas, near), x[0], step)),)
        product = True
    else:
        rows, cols = near.any(axis=1), near.any(axis=0)
        argmax = (
            tuple(snap_points(runs_to_intervals(thetas, rows), x[0], step)),
            tuple(snap_points(runs_to_intervals(thetas, cols), x[1], step)),
        )
        product = bool(np.array_equal(near, np.outer(rows, cols)))
    witness = tuple(UnitaryParams(float(np.clip(t, 0.0, np.pi))) for t in x)
    return BestResponse(fx, witness, argmax, product, obj.qubits)


_SU2_BOUNDS = [(0.0, np.pi), (0.0, 2 * np.pi), (0.0, 2 * np.pi)]


def _best_su2(obj: Objective, g: int) -> BestResponse:
    th = np.linspace(0.0, np.pi, g)
    ph = np.linspace(0.0, 2 * np.pi, g, endpoint=False)
    tt, aa, bb = (a.ravel() for a in np.meshgrid(th, ph, ph, indexing="ij"))
    mats = su2_matrices(tt, aa, bb)
    k = len(obj.qubits)
    values = obj.grid([mats] * k)
    flat = np.argsort(values.ravel())[::-1][:4]

    def to_params(v):
        # alpha, beta are periodic; fold back into [0, 2*pi)
        out = []
        for i in range(k):
            t, a, b = v[3 * i : 3 * i + 3]
            out.append(UnitaryParams(float(np.clip(t, 0, np.pi)), float(a % (2 * np.pi)), float(b % (2 * np.pi))))
        return out

    best_v, best_f = None, -np.inf
    for idx in flat:
        cell = np.unravel_index(int(idx), values.shape)
        v0 = np.concatenate([[tt[c], aa[c], bb[c]] for c in cell])
        res = optimize.minimize(
            lambda v: -obj(to_params(v)), v0, method="L-BFGS-B", bounds=_SU2_BOUNDS * k
        )
        f = max(-res.fun, float(values[cell]))
        if f > best_f:
            best_f, best_v = f, (res.x if -res.fun >= values[cell] else v0)
    return BestResponse(float(best_f), tuple(to_params(best_v)), None, False, obj.qubits)


# -- sequential-type rationality --------------------------------------------


@dataclass(frozen=True)
class RationalityVerdict:
    """Outcome at one information set; off-path sets pass vacuously."""

    info_set: str
    owner: Owner
    on_path: bool
    reach: float
    weights: tuple
    achieved_value: float
    max_value: float
    best: BestResponse | None = field(default=None, compare=False)
    tol: float = OPTIMALITY_TOL

    @property
    def gap(self) -> float:
        return self.max_value - self.achieved_value

    @property
    def passed(self) -> bool:
        return (not self.on_path) or self.gap <= self.tol

    @property
    def argmax_witness(self) -> str:
        return self.best.describe() if self.best is not None else ""


def sequential_rationality_q(
    config: QSchemeConfig,
    profile: QProfile,
    scope: str = "pair",
    grid: int = DEFAULT_GRID,
    tol: float = OPTIMALITY_TOL,
    su2_grid: int = DEFAULT_SU2_GRID,
) -> list[RationalityVerdict]:
    """Check every information set of ``profile`` in the order t1, t2, left, right."""
    config.check_profile(profile)
    full_ops = [config.chance] + list(profile.ops)
    verdicts = []
    for h in signaling_info_sets(scope):
        obs = config.observable(_owner_player(h.owner))
        try:
            belief = q_beliefs(pre_move_state(config, profile, h), h)
        except OffPath:
            verdicts.append(RationalityVerdict(h.name, h.owner, False, 0.0, (), float("nan"), float("nan"), None, tol))
            continue
        rho = conditional_mixed(belief)
        held = [q for q in owned_qubits(h.owner) if q not in h.acting_qubits]
        if held:
            ops = [IDENTITY] * N_QUBITS
            for q in held:
                ops[q] = full_ops[q]
            rho = rho.evolve(ops)
        prescribed = [full_ops[q] for q in h.acting_qubits]
        achieved = evaluate(rho, obs, h.acting_qubits, prescribed)
        br = best_response(rho, obs, h.acting_qubits, config.mode(h.owner), grid, tol, su2_grid)
        # the prescribed operators are themselves a feasible deviation
        top = max(br.max_value, achieved)
        verdicts.append(RationalityVerdict(h.name, h.owner, True, belief.reach, belief.weights, achieved, top, br, tol))
    return verdicts


CLASSES = ("both", "nash-only", "rational-only", "neither")


@dataclass(frozen=True)
class ProfileClass:
    profile: QProfile
    payoffs: tuple
    is_nash: bool
    verdicts: tuple

    @property
    def rational(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def off_path_sets(self) -> tuple:
        return tuple(v.info_set for v in self.verdicts if not v.on_path)

    @property
    def kind(self) -> str:
        if self.is_nash:
            return "both" if self.rational else "nash-only"
        return "rational-only" if self.rational else "neither"


@dataclass(frozen=True)
class QPBEReport:
    entries: tuple

    @property
    def pbe(self) -> list[QProfile]:
        """Profiles that are Nash equilibria and sequentially-type rational."""
        return [e.profile for e in self.entries if e.kind == "both"]

    @property
    def exploratory(self) -> list[QProfile]:
        """Sequentially-type rational profiles that are not Nash equilibria."""
        return [e.profile for e in self.entries if e.kind == "rational-only"]

    def by_kind(self) -> dict[str, list[QProfile]]:
        return {k: [e.profile for e in self.entries if e.kind == k] for k in CLASSES}


def q_pbe(
    config: QSchemeConfig,
    scope: str = "pair",
    grid: int = DEFAULT_GRID,
    tol: float = OPTIMALITY_TOL,
) -> QPBEReport:
    """Classify the 16 pure theta-only profiles by Nash x sequential-type rationality."""
    nash = {p.thetas for p in q_pure_nash(config)}
    entries = []
    for prof in all_pure_qprofiles():
        verdicts = tuple(sequential_rationality_q(config, prof, scope, grid, tol))
        entries.append(ProfileClass(prof, q_payoffs(config, prof), prof.thetas in nash, verdicts))
    return QPBEReport(tuple(entries))
