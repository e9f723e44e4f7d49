from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from superjet import (
    GrassmannElement,
    ParityError,
    Polynomial,
    SplitMix64,
    exp_pair,
    faa_di_bruno,
    poly_compose,
    poly_derive,
    poly_eval,
    taylor_coefficient,
    taylor_of,
    trunc_compose,
    trunc_mul,
)
from superjet.polyalg import iter_multiindices_upto
from superjet.suites import random_polynomial

from conftest import polynomials

x0_strategy = st.lists(
    st.fractions(min_value=-2, max_value=2, max_denominator=2), min_size=2, max_size=2
)


def identity_jet(x0, k):
    m = len(x0)
    return taylor_of([Polynomial.variable(m, i) for i in range(m)], x0, k)


@given(polynomials(p=2, degree=3), x0_strategy)
def test_taylor_of_matches_taylor_coefficients(f, x0):
    jet = taylor_of([f], x0, 3)
    assert jet.base_value == (f.eval_scalar(x0),)
    for I in iter_multiindices_upto(2, 3):
        if sum(I) == 0:
            continue
        assert jet.coefficient(I)[0] == taylor_coefficient(f, I, x0)


@given(polynomials(p=1, degree=2), polynomials(p=2, degree=2), x0_strategy)
def test_truncated_composition_is_functorial(outer, inner, x0):
    for k in (1, 2, 3):
        inner_jet = taylor_of([inner], x0, k)
        outer_jet = taylor_of([outer], inner_jet.base_value, k)
        composite = poly_compose(outer, [inner], degree_bound=None)
        assert trunc_compose(outer_jet, inner_jet, k) == taylor_of([composite], x0, k)


@given(polynomials(p=2, degree=3), x0_strategy)
def test_identity_jets_are_neutral(f, x0):
    for k in (1, 2):
        jet = taylor_of([f], x0, k)
        assert trunc_compose(jet, identity_jet(x0, k), k) == jet
        # scalar identity on the output side
        post = identity_jet(jet.base_value, k)
        assert trunc_compose(post, jet, k) == jet


@given(polynomials(p=2, degree=2), polynomials(p=2, degree=2), x0_strategy)
def test_truncated_product_matches_polynomial_product(f, g, x0):
    for k in (1, 2, 3):
        lhs = trunc_mul(taylor_of([f], x0, k), taylor_of([g], x0, k), k)
        assert lhs == taylor_of([f * g], x0, k)


def test_compose_rejects_base_point_mismatch():
    f = Polynomial.monomial(1, (2,))
    a = taylor_of([f], [Fraction(0)], 2)
    b = taylor_of([f], [Fraction(1)], 2)
    with pytest.raises(ValueError):
        trunc_compose(a, b, 2)


def test_faa_di_bruno_chain_rule_orders():
    # d/dx of b(phi(x)) for b = y^3, phi = x^2 + x at x0 = 1
    b = Polynomial.monomial(1, (3,))
    phi = Polynomial(1, {(2,): Fraction(1), (1,): Fraction(1)})
    x0 = [Fraction(1)]
    composite = poly_compose(b, [phi], degree_bound=None)
    for m in range(1, 7):
        table = faa_di_bruno([b], [phi], x0, m)
        ((K, vals),) = table.items()
        assert vals[0] == poly_derive(composite, K).eval_scalar(x0)


def test_faa_di_bruno_multivariate_against_oracle():
    rng = SplitMix64(21)
    for _ in range(12):
        phi = [random_polynomial(rng, 2, degree=2) for _ in range(2)]
        b = [random_polynomial(rng, 2, degree=3)]
        x0 = [Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2))]
        composite = poly_compose(b[0], phi, degree_bound=None)
        for m in (1, 2, 3, 4):
            for K, vals in faa_di_bruno(b, phi, x0, m).items():
                assert vals[0] == poly_derive(composite, K).eval_scalar(x0)


def test_faa_di_bruno_rejects_order_zero():
    with pytest.raises(ValueError):
        faa_di_bruno([Polynomial.one(1)], [Polynomial.one(1)], [Fraction(0)], 0)


def test_exp_pair_evaluates_on_nilpotents():
    # jet evaluation on a nilpotent increment == direct polynomial evaluation
    rng = SplitMix64(22)
    for _ in range(10):
        f = random_polynomial(rng, 1, degree=3)
        x0 = Fraction(rng.randint(-2, 2))
        nil = GrassmannElement(3, {3: Fraction(1, 2), 5: Fraction(rng.randint(-2, 2))})
        jet = taylor_of([f], [x0], 3)
        direct = poly_eval(f, [GrassmannElement.scalar(3, x0) + nil])
        (via_jet,) = exp_pair(jet, [nil], [], n=3)
        assert via_jet == direct


def test_exp_pair_checks_parities():
    jet = taylor_of([Polynomial.variable(1, 0)], [Fraction(0)], 1)
    odd = GrassmannElement.gen(2, 1)
    with pytest.raises(ParityError):
        exp_pair(jet, [odd], [], n=2)
