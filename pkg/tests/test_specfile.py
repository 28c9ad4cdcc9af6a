import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsignal.hilbert import UnitaryParams
from qsignal.qsignaling import ParamMode
from qsignal.specfile import GameSpecFile, SpecError, dumps, load, loads, parse_number, resolve

import oracles

PI = math.pi

BASE = """\
[chance]
p = 0.5

[payoffs]
t1.L.u = [6, 12]
t1.L.d = [4, 0]
t2.L.u = [6, 0]
t2.L.d = [6, 2]
t1.R.u = [10, 8]
t1.R.d = [6, 2]
t2.R.u = [4, 2]
t2.R.d = [6, 0]
"""


def with_chance(chance: str) -> str:
    return BASE.replace("p = 0.5", chance)


class TestParseNumber:
    @pytest.mark.parametrize("text, value", [
        ("pi", PI), ("pi/2", PI / 2), ("3pi/4", 3 * PI / 4), ("-pi/6", -PI / 6), ("1/2", 0.5),
        ("0.25", 0.25), ("2*pi", 2 * PI), (" pi / 3 ", PI / 3), (3, 3.0), (1.5, 1.5), ("1e-7", 1e-7),
    ])
    def test_values(self, text, value):
        assert parse_number(text) == pytest.approx(value, rel=1e-15)

    @pytest.mark.parametrize("text", ["", "tau", "pi/0", "pi pi", True, None, "1/2/3"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_number(text)


class TestLoads:
    def test_bundled_paper(self):
        g = load("@paper")
        assert g.leaves == tuple(tuple(float(v) for v in pair) for pair in oracles.PAPER_LEAVES)
        assert g.chance == UnitaryParams(PI / 2, PI / 6, PI / 3)
        assert g.p == pytest.approx(0.5, abs=1e-15)
        assert g.modes == (ParamMode.THETA_ONLY, ParamMode.THETA_ONLY)
        assert (g.grid, g.tol, g.scope) == (513, 1e-7, "pair")

    def test_roundtrip_paper(self):
        g = load("@paper")
        assert loads(dumps(g)) == g

    def test_roundtrip_probability_chance(self):
        g = loads(BASE)
        assert g.chance_p == 0.5 and g.chance_u is None
        assert loads(dumps(g)) == g
        assert g.chance.theta == pytest.approx(PI / 2, abs=1e-15)

    @given(st.floats(0, 1), st.sampled_from(["theta", "su2"]), st.sampled_from(["pair", "single"]))
    def test_roundtrip_property(self, p, mode, scope):
        g = GameSpecFile(tuple((float(i), float(-i)) for i in range(8)), chance_p=p,
                         modes=(ParamMode(mode), ParamMode.THETA_ONLY), scope=scope)
        assert loads(dumps(g)) == g

    def test_empty(self):
        with pytest.raises(SpecError) as e:
            loads("   \n")
        assert e.value.kind == "syntax" and (e.value.line, e.value.col) == (1, 1)

    def test_toml_syntax_position(self):
        with pytest.raises(SpecError) as e:
            loads(BASE + "t2.R.d = [\n", path="x.game")
        assert e.value.kind == "syntax"
        assert e.value.line is not None and e.value.col is not None
        assert str(e.value).startswith("x.game:")

    def test_p_out_of_range(self):
        with pytest.raises(SpecError) as e:
            loads(with_chance("p = 1.5"))
        assert e.value.kind == "semantic" and e.value.field == "chance.p"
        assert e.value.line == 2
        assert "chance.p" in str(e.value)

    def test_missing_leaf(self):
        text = "\n".join(line for line in BASE.splitlines() if not line.startswith("t2.R.u"))
        with pytest.raises(SpecError) as e:
            loads(text)
        assert e.value.field == "payoffs.t2.R.u"

    def test_unknown_leaf(self):
        with pytest.raises(SpecError) as e:
            loads(BASE + "t3.L.u = [1, 1]\n")
        assert e.value.field == "payoffs.t3.L.u"

    def test_bad_expression(self):
        with pytest.raises(SpecError) as e:
            loads(with_chance('theta = "half pi"'))
        assert e.value.field == "chance.theta"

    def test_both_chance_forms(self):
        with pytest.raises(SpecError) as e:
            loads(with_chance('p = 0.5\ntheta = "pi/2"'))
        assert e.value.field == "chance"

    def test_angle_range(self):
        with pytest.raises(SpecError) as e:
            loads(with_chance('theta = "pi/2"\nalpha = "3pi"'))
        assert e.value.field == "chance.alpha"

    def test_bad_mode_and_options(self):
        with pytest.raises(SpecError) as e:
            loads(BASE + '\n[players]\nplayer1 = "qubit"\n')
        assert e.value.field == "players.player1"
        with pytest.raises(SpecError) as e:
            loads(BASE + "\n[analysis]\ngrid = 2\n")
        assert e.value.field == "analysis.grid"
        with pytest.raises(SpecError) as e:
            loads(BASE + '\n[analysis]\nscope = "all"\n')
        assert e.value.field == "analysis.scope"

    def test_nonfinite_payoff(self):
        with pytest.raises(SpecError):
            loads(BASE.replace("[6, 12]", "[inf, 12]"))

    def test_unitary_chance_probability(self):
        g = loads(with_chance('theta = "pi/3"'))
        assert g.p == pytest.approx(math.cos(PI / 6) ** 2, abs=1e-15)
        assert g.chance == UnitaryParams(PI / 3)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecError) as e:
            load(tmp_path / "nope.game")
        assert e.value.kind == "syntax"

    def test_resolve(self, tmp_path):
        assert resolve("@paper").name == "paper.game"
        assert resolve(tmp_path) == tmp_path
