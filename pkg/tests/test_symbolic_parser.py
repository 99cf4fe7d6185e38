import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from diracpos.symbolic import ExpressionSyntaxError, UnknownSymbolError, parse, parse_corpus, to_text
from diracpos.symbolic.derive import corpus_text
from diracpos.symbolic.expr import Ladder, Mom, Overlap, Tau


def test_single_annihilator():
    e = parse("c(p,s)")
    assert len(e) == 1
    (m,) = e.terms
    assert m.ladders == (Ladder("c", False, Mom(1, "p"), "s"),)
    assert m.coef == 1 and not m.atoms


def test_number_operator_line_has_three_monomials():
    e = parse("c+(p,s) c(p,s) + d+(p,s) d(p,s) - 1")
    assert len(e) == 3
    assert e.terms[2].coef == -1 and not e.terms[2].ladders


@pytest.mark.parametrize(
    "text, offset",
    [
        ("c+(p,", 4),
        ("c+(q,s)", 3),
        ("c(p,s) +", 7),
        ("delta(p'*p)", 8),
        ("exp(i*(p0)*x)", 11),
        ("c(p,s) $", 7),
    ],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ExpressionSyntaxError) as err:
        parse(text)
    assert err.value.offset == offset


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError) as err:
        parse("c(p,s) foo")
    assert err.value.offset == 7
    assert isinstance(err.value, ValueError)


def test_bare_tau_takes_sector_from_species():
    assert parse("c+(p,s) c(p,s) tau").terms[0].atoms == (Tau(1),)
    assert parse("d+(p,s) d(p,s) tau").terms[0].atoms == (Tau(-1),)
    with pytest.raises(ExpressionSyntaxError):
        parse("c+(p,s) d(p,s) tau")


def test_derivative_sign_convention():
    # dp[u+(-p,s)] is d/dp of u^+(-p); stored as -d/d(argument)
    (m,) = parse("dp[u+(-p,s')]v(p,s)").terms
    assert m.coef == -1
    assert m.atoms == (Overlap("u", Mom(-1, "p"), "s'", "v", Mom(1, "p"), "s", True, False),)
    assert to_text(parse("dp[u+(-p,s')]v(p,s)")) == "sum(): dp[u+(-p,s')]v(p,s)"


def test_parenthesized_groups_expand():
    e = parse("(c+(p,s) c(p,s) - d+(p,s) d(p,s)) t*p*p0^-1")
    assert len(e) == 2
    assert [m.coef for m in e] == [1, -1]


def test_numeric_group_merges():
    (m,) = parse("(1/2 + i) c(p,s)").terms
    assert m.coef == sp.Rational(1, 2) + sp.I


def test_continuation_lines_stay_in_group():
    e = parse("sum(p,s): c(p,s)\n  + d(p,s)\nsum(p): 1")
    assert [sorted(m.bound) for m in e] == [["p", "s"], ["p", "s"], ["p"]]


def test_golden_corpus_round_trip():
    blocks = parse_corpus(corpus_text("golden.txt"))
    assert len(blocks) >= 10
    for name, e in blocks.items():
        assert parse(to_text(e)) == e, name


def test_template_and_target_corpora_round_trip():
    for fname in ("targets.txt",):
        for e in parse_corpus(corpus_text(fname)).values():
            assert parse(to_text(e)) == e
    text = corpus_text("templates.txt").replace("MU", "1")
    for e in parse_corpus(text).values():
        assert parse(to_text(e)) == e


# ---- generated round trips

moms = st.builds(lambda s, v: f"{'-' if s else ''}{v}", st.booleans(), st.sampled_from(["p", "p'"]))
spins = st.sampled_from(["s", "s'"])
ladders = st.builds(
    lambda name, m, s, d: f"dp[{name}({m},{s})]" if d else f"{name}({m},{s})",
    st.sampled_from(["c", "c+", "d", "d+"]),
    moms,
    spins,
    st.booleans(),
)
overlaps = st.builds(
    lambda b, m1, s1, k, m2, s2: f"{b}+({m1},{s1}){k}({m2},{s2})",
    st.sampled_from(["u", "v"]), moms, spins, st.sampled_from(["u", "v"]), moms, spins,
)
atoms = st.one_of(
    ladders,
    overlaps,
    st.sampled_from(["tau(+)", "tau(-)", "t", "p^2", "p0^-1", "p0'", "exp(i*(p0'-p0)*t)", "delta(p'+p)", "delta(s,s')"]),
)
coefs = st.sampled_from(["", "2 ", "i ", "3/4 ", "(1-i) "])
monos = st.builds(
    lambda sign, c, fs: f"{sign} {c}" + " ".join(fs),
    st.sampled_from(["+", "-"]),
    coefs,
    st.lists(atoms, min_size=1, max_size=4),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(monos, min_size=1, max_size=4))
def test_generated_round_trip(parts):
    text = "sum(p,p',s,s'): " + " ".join(parts)
    e = parse(text)
    assert parse(to_text(e)) == e
