"""Game spec files.

A spec file is TOML. Angles and probabilities may be numbers or strings
such as ``"pi"``, ``"pi/2"``, ``"3pi/4"``, ``"-pi/6"`` or ``"1/2"``::

    [chance]            # exactly one of: p, or theta/alpha/beta
    theta = "pi/2"
    alpha = "pi/6"
    beta = "pi/3"

    [players]           # "theta" (U(theta,0,0) only) or "su2"
    player1 = "theta"
    player2 = "theta"

    [analysis]          # all optional
    grid = 513
    tol = 1e-7
    scope = "pair"      # or "single"
    su2_grid = 9

    [payoffs]           # (u1, u2) at every leaf type.action.response
    t1.L.u = [6, 12]
    ...
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classical import LEAF_ORDER, SignalingSpec
from .hilbert import UnitaryParams
from .qpbe import DEFAULT_GRID, DEFAULT_SU2_GRID, OPTIMALITY_TOL, SCOPES
from .qsignaling import ParamMode, QSchemeConfig
from .search import fmt_angle

BUNDLED = {"@paper": "paper.game"}


class SpecError(Exception):
    """Invalid spec file; ``kind`` is ``"syntax"`` or ``"semantic"``."""

    def __init__(self, message: str, kind: str = "semantic", field: str | None = None,
                 line: int | None = None, col: int | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.kind = kind
        self.field = field
        self.line = line
        self.col = col
        self.path = path

    def __str__(self):
        where = self.path or "<spec>"
        if self.line is not None:
            where += f":{self.line}"
            if self.col is not None:
                where += f":{self.col}"
        what = f"{self.kind} error"
        if self.field:
            what += f" in '{self.field}'"
        return f"{where}: {what}: {self.message}"


_PI_EXPR = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*(?P<num>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*(?P<pi>pi)?
        \s*(?:/\s*(?P<den>\d+(?:\.\d*)?|\.\d+))?\s*$""",
    re.VERBOSE,
)


def parse_number(text) -> float:
    """Parse a number, ``pi`` multiple or fraction."""
    if isinstance(text, bool):
        raise ValueError(f"expected a number, got {text!r}")
    if isinstance(text, (int, float)):
        return float(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a number, got {text!r}")
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text)
    if not m or not (m.group("num") or m.group("pi")):
        raise ValueError(f"cannot read {text!r} as a number (use e.g. 0.5, 1/2, pi/2, 3pi/4)")
    value = float(m.group("num")) if m.group("num") else 1.0
    if m.group("pi"):
        value *= math.pi
    if m.group("den"):
        den = float(m.group("den"))
        if den == 0:
            raise ValueError(f"division by zero in {text!r}")
        value /= den
    return -value if m.group("sign") == "-" else value


@dataclass(frozen=True)
class GameSpecFile:
    leaves: tuple
    chance_p: float | None = None
    chance_u: UnitaryParams | None = None
    modes: tuple = (ParamMode.THETA_ONLY, ParamMode.THETA_ONLY)
    grid: int = DEFAULT_GRID
    tol: float = OPTIMALITY_TOL
    scope: str = "pair"
    su2_grid: int = DEFAULT_SU2_GRID

    @property
    def p(self) -> float:
        """Classical probability of ``t1`` (``cos^2(theta/2)`` for a unitary chance)."""
        if self.chance_p is not None:
            return self.chance_p
        return min(max(math.cos(self.chance_u.theta / 2.0) ** 2, 0.0), 1.0)

    @property
    def chance(self) -> UnitaryParams:
        """Chance operator; a probability ``p`` maps to ``U(2 arccos sqrt(p), 0, 0)``."""
        if self.chance_u is not None:
            return self.chance_u
        return UnitaryParams(min(2.0 * math.acos(math.sqrt(self.chance_p)), math.pi))

    def classical_spec(self) -> SignalingSpec:
        return SignalingSpec(self.p, self.leaves)

    def quantum_config(self) -> QSchemeConfig:
        return QSchemeConfig(SignalingSpec(self.p, self.leaves), self.chance, self.modes)


def _locate(text: str, section: str, key: str) -> tuple[int | None, int | None]:
    current = None
    head = key.split(".")[0]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            current = line.strip("[] ")
            if current == section and not key:
                return lineno, 1
            continue
        if current == section and key and re.match(rf"{re.escape(head)}\s*[.=]", line):
            return lineno, raw.index(head) + 1
    return None, None


def loads(text: str, path: str | None = None) -> GameSpecFile:
    if not text.strip():
        raise SpecError("spec file is empty", kind="syntax", line=1, col=1, path=path)
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        msg = str(e).split(" (at ")[0]
        raise SpecError(msg, kind="syntax", line=getattr(e, "lineno", None), col=getattr(e, "colno", None),
                        path=path) from None

    def fail(msg, section, key=""):
        line, col = _locate(text, section, key)
        field = f"{section}.{key}" if key else section
        raise SpecError(msg, field=field, line=line, col=col, path=path)

    unknown = set(doc) - {"chance", "players", "analysis", "payoffs"}
    if unknown:
        fail(f"unknown section(s) {sorted(unknown)}", sorted(unknown)[0])

    def number(section, key, value):
        try:
            return parse_number(value)
        except ValueError as e:
            fail(str(e), section, key)

    chance = doc.get("chance")
    if not isinstance(chance, dict):
        fail("missing [chance] section", "chance")
    has_p = "p" in chance
    angle_keys = [k for k in ("theta", "alpha", "beta") if k in chance]
    extra = set(chance) - {"p", "theta", "alpha", "beta"}
    if extra:
        fail(f"unknown key {sorted(extra)[0]!r}", "chance", sorted(extra)[0])
    if has_p == bool(angle_keys):
        fail("give exactly one chance representation: p, or theta/alpha/beta", "chance")
    chance_p = chance_u = None
    if has_p:
        chance_p = number("chance", "p", chance["p"])
        if not 0.0 <= chance_p <= 1.0:
            fail(f"p must lie in [0, 1], got {chance_p}", "chance", "p")
    else:
        if "theta" not in chance:
            fail("theta is required when the chance move is a unitary", "chance")
        vals = {k: number("chance", k, chance.get(k, 0.0)) for k in ("theta", "alpha", "beta")}
        try:
            chance_u = UnitaryParams(**vals)
        except ValueError as e:
            bad = "theta" if "theta" in str(e) else ("alpha" if "alpha" in str(e) else "beta")
            fail(str(e), "chance", bad)

    players = doc.get("players", {})
    modes = []
    for key in ("player1", "player2"):
        raw = players.get(key, "theta")
        try:
            modes.append(ParamMode(raw))
        except ValueError:
            fail(f"player mode must be 'theta' or 'su2', got {raw!r}", "players", key)
    if set(players) - {"player1", "player2"}:
        fail(f"unknown key {sorted(set(players) - {'player1', 'player2'})[0]!r}", "players")

    analysis = doc.get("analysis", {})
    opts = {}
    for key, default in (("grid", DEFAULT_GRID), ("su2_grid", DEFAULT_SU2_GRID)):
        v = analysis.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool) or v < 3:
            fail(f"{key} must be an integer >= 3, got {v!r}", "analysis", key)
        opts[key] = v
    tol = number("analysis", "tol", analysis.get("tol", OPTIMALITY_TOL))
    if not tol > 0:
        fail(f"tol must be positive, got {tol}", "analysis", "tol")
    scope = analysis.get("scope", "pair")
    if scope not in SCOPES:
        fail(f"scope must be one of {SCOPES}, got {scope!r}", "analysis", "scope")
    if set(analysis) - {"grid", "su2_grid", "tol", "scope"}:
        fail("unknown analysis option", "analysis")

    payoffs = doc.get("payoffs")
    if not isinstance(payoffs, dict):
        fail("missing [payoffs] section", "payoffs")
    leaves = []
    for t, a1, a2 in LEAF_ORDER:
        key = f"{t}.{a1}.{a2}"
        try:
            pair = payoffs[t][a1][a2]
        except (KeyError, TypeError):
            fail(f"missing leaf payoff {key}", "payoffs", key)
        if not isinstance(pair, list) or len(pair) != 2:
            fail(f"leaf {key} must be a pair [u1, u2]", "payoffs", key)
        u = (number("payoffs", key, pair[0]), number("payoffs", key, pair[1]))
        if not all(math.isfinite(x) for x in u):
            fail(f"leaf {key} payoffs must be finite", "payoffs", key)
        leaves.append(u)
    known = {f"{t}.{a1}.{a2}" for t, a1, a2 in LEAF_ORDER}
    for key in _leaf_keys(payoffs):
        if key not in known:
            fail(f"unknown leaf {key}", "payoffs", key)

    return GameSpecFile(tuple(leaves), chance_p, chance_u, tuple(modes), opts["grid"], tol, scope,
                        opts["su2_grid"])


def _leaf_keys(tree, prefix=""):
    for k, v in tree.items():
        if isinstance(v, dict):
            yield from _leaf_keys(v, f"{prefix}{k}.")
        else:
            yield f"{prefix}{k}"


def resolve(path: str | Path) -> Path:
    """Map bundled aliases such as ``@paper`` to their packaged file."""
    if str(path) in BUNDLED:
        return Path(str(resources.files("qsignal") / "data" / BUNDLED[str(path)]))
    return Path(path)


def load(path: str | Path) -> GameSpecFile:
    p = resolve(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecError(f"cannot read spec file: {e.strerror}", kind="syntax", path=str(p)) from None
    return loads(text, path=str(p))


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() and abs(x) < 1e15 else repr(float(x))


def _angle(x: float) -> str:
    s = fmt_angle(x)
    return f'"{s}"' if "pi" in s and parse_number(s) == x else repr(float(x))


def dumps(g: GameSpecFile) -> str:
    """Serialize back to spec-file text; ``loads(dumps(g)) == g``."""
    out = ["[chance]"]
    if g.chance_p is not None:
        out.append(f"p = {repr(float(g.chance_p))}")
    else:
        for k in ("theta", "alpha", "beta"):
            out.append(f"{k} = {_angle(getattr(g.chance_u, k))}")
    out += ["", "[players]", f'player1 = "{g.modes[0].value}"', f'player2 = "{g.modes[1].value}"']
    out += ["", "[analysis]", f"grid = {g.grid}", f"tol = {g.tol!r}", f'scope = "{g.scope}"',
            f"su2_grid = {g.su2_grid}"]
    out += ["", "[payoffs]"]
    for (t, a1, a2), (u1, u2) in zip(LEAF_ORDER, g.leaves):
        out.append(f"{t}.{a1}.{a2} = [{_num(u1)}, {_num(u2)}]")
    return "\n".join(out) + "\n"
