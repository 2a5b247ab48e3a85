"""The sixteen-element basis: independence, change of basis, rediscovery."""
import pytest

from sigma35.basis import (
    BASIS,
    NotInSpanError,
    REDISCOVERY_TARGETS,
    TwoPoleBasis,
    express_in_basis,
    format_terms,
    independence_rank,
    lambda_token,
    rediscover_relations,
)
from sigma35.catalog import combine_terms, load_catalog, load_variants, parse_terms


@pytest.fixture(scope="session")
def basis(sigma5):
    return TwoPoleBasis(sigma5)


@pytest.fixture(scope="session")
def found(basis):
    return basis.rediscover()


# ------------------------------------------------------------ the basis set

def test_basis_has_sixteen_elements_in_fixed_order():
    assert [e.token for e in BASIS] == [
        "1",
        "p11", "p12", "p13", "p14", "p22",
        "p23", "p24", "p33", "p34", "p44",
        "Q1144", "Q1244", "Q2233", "Q1444", "Q2444",
    ]


def test_basis_weights():
    assert {e.token: e.weight for e in BASIS} == {
        "1": 0,
        "p11": -14, "p12": -11, "p13": -9, "p14": -8, "p22": -8,
        "p23": -6, "p24": -5, "p33": -4, "p34": -3, "p44": -2,
        "Q1144": -16, "Q1244": -13, "Q2233": -12, "Q1444": -10, "Q2444": -7,
    }


def test_only_weight_collision_is_p14_p22():
    pairs = [
        (a.token, b.token)
        for i, a in enumerate(BASIS)
        for b in BASIS[i + 1:]
        if a.weight == b.weight
    ]
    assert pairs == [("p14", "p22")]


def test_independence_rank_is_sixteen(basis):
    assert basis.independence_rank() == 16


# ----------------------------------------------------------- rediscoveries

def test_rediscoveries_all_verify(found):
    assert set(found) == set(REDISCOVERY_TARGETS)
    for expr in found.values():
        r = expr.report
        assert r.verdict == "PASS"
        assert r.power == 2
        w_lo, w_hi = r.window
        assert w_hi - w_lo >= 6


def test_rediscovered_equations(found):
    assert {t: e.equation for t, e in found.items()} == {
        "Q4444": "Q4444 = -3*p33",
        "Q3444": "Q3444 = 3*p24",
        "Q3344": "Q3344 = -p23 + 2*l4*p34",
        "Q3334": "Q3334 = -Q2444",
        "Q3333": "Q3333 = 12*p14 - 3*p22",
        "Q2344": "Q2344 = 4*p14 - p22 + 2*l4*p24",
        "Q2334": "Q2334 = l2 + 2*p13 + 3*l3*p34",
    }


def test_five_rediscoveries_match_the_received_catalog(found):
    received = {e.ident: e for e in load_catalog("four-index")}
    matching = [
        t for t, expr in found.items()
        if combine_terms(expr.terms) == combine_terms(received[t].rhs)
    ]
    assert matching == ["Q4444", "Q3444", "Q3344", "Q3334", "Q3333"]


def test_corrected_rediscoveries_match_their_passing_variants(found):
    received = {e.ident: e for e in load_catalog("four-index")}
    variants = {
        "Q2344": load_variants("Q2344")[0],
        "Q2334": next(
            v for v in load_variants("Q2334") if v.ident == "Q2334.constant"
        ),
    }
    for ident, variant in variants.items():
        got = combine_terms(found[ident].terms)
        assert got == combine_terms(variant.rhs)
        assert got != combine_terms(received[ident].rhs)


def test_report_identity_and_provenance(found):
    r = found["Q4444"].report
    assert r.relation == "span:Q4444"
    assert r.section == "basis"
    assert r.expected == "PASS"
    assert r.provenance["max_grade"] == 5


def test_expression_line(found):
    assert found["Q3444"].line() == "Q3444 = 3*p24  [PASS]"


# ------------------------------------------------------------------ guards

@pytest.mark.parametrize(
    "target,power",
    [("p444", 3), ("p33*p44", 4), ("D4[Q4444]", 3)],
)
def test_higher_pole_targets_are_rejected(basis, target, power):
    with pytest.raises(NotInSpanError, match=f"sigma\\^{power}"):
        basis.express(target)


def test_multi_term_target_is_rejected(basis):
    with pytest.raises(ValueError, match="single term"):
        basis.express("p11 + p22")


# --------------------------------------------------- trivial, scaled, fresh

def test_identity_and_scaled_targets(basis):
    assert basis.express("1").equation == "1 = 1"
    assert basis.express("p22").equation == "p22 = p22"
    assert basis.express("2*Q3444").equation == "2*Q3444 = 6*p24"


def test_expression_is_reproducible_from_a_fresh_instance(basis, sigma5):
    again = TwoPoleBasis(sigma5).express("Q3344")
    first = basis.express("Q3344")
    assert again.equation == first.equation
    assert again.terms == first.terms


# --------------------------------------------------------------- rendering

def test_lambda_token():
    assert lambda_token((0, 0, 0, 0, 0)) == ""
    assert lambda_token((0, 0, 0, 0, 1)) == "l4"
    assert lambda_token((1, 0, 0, 0, 2)) == "l4^2*l0"


def test_format_terms_round_trips_canonical_syntax():
    for src in (
        "4*p14 - p22 + 2*l4*p24",
        "-3*p33",
        "l2 + 2*p13 + 3*l3*p34",
        "-1/2*p33*p334 + 1/2*p333*p34",
    ):
        assert format_terms(parse_terms(src)) == src


def test_format_terms_edge_cases():
    assert format_terms(()) == "0"
    assert format_terms(parse_terms("3/2")) == "3/2"
    assert format_terms(parse_terms("-1")) == "-1"


# ---------------------------------------------------------------- wrappers

def test_module_wrappers(basis):
    assert express_in_basis("Q3444", basis.ver).equation == "Q3444 = 3*p24"
    only = rediscover_relations(basis, targets=("Q4444",))
    assert list(only) == ["Q4444"]
    assert only["Q4444"].equation == "Q4444 = -3*p33"
    assert independence_rank(basis) == 16
