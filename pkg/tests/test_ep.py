import pytest

from qtcartan.braid import invert_series
from qtcartan.cartan import deformed_cartan, validate_and_derive
from qtcartan.ep import (
    ClosedForm,
    ExtReader,
    TruncationError,
    ep_E_S,
    ep_S_S,
    ext_dim,
    pbar_graded_dims,
)
from qtcartan.gamma import LaurentPoly, make_monomial, poly_mul, specialize
from oracles import BATTERY, FINITE, INFINITE

GCMS = {name: validate_and_derive(c) for name, c in BATTERY.items()}


def mono(q=0, t=0, mu=None, c=1):
    return LaurentPoly.monomial(q=q, t=t, mu=mu, coeff=c)


def test_affine_offdiagonal():
    g = GCMS["A1(1)"]
    cf = ep_E_S(g, 0, 1)
    mus = mono(mu={(0, 1, 1): 1}) + mono(mu={(0, 1, 2): 1})
    assert cf.numerator == -(mono(q=-1, t=1) * mus)
    assert cf.denom_factors == ()


def test_a1_closed_form():
    cf = ep_E_S(GCMS["A1"], 0, 0)
    c11 = mono(q=1, t=-1) + mono(q=-1, t=1)
    expected = mono(q=-1, t=1) * (1 - mono(q=-2, t=2)) * c11
    assert cf.numerator == expected
    assert cf.denom_factors == (make_monomial(q=-4, t=4),)
    assert cf.directions == ("t",)


def test_a1_s_s():
    cf = ep_S_S(GCMS["A1"], 0, 0, 1)
    base = ep_E_S(GCMS["A1"], 0, 0).numerator
    assert cf.numerator == (1 - mono(q=2)) * base
    assert cf.denom_factors == (make_monomial(q=-4, t=4), make_monomial(q=2))
    assert cf.directions == ("t", "q")


@pytest.mark.parametrize("name", INFINITE)
def test_infinite_denominators(name):
    g = GCMS[name]
    cf = ep_S_S(g, 0, 1, 1)
    assert cf.denom_factors == (make_monomial(q=2 * g.r),)
    cm = deformed_cartan(g)
    for i in range(g.n):
        for j in range(g.n):
            assert ep_E_S(g, i, j).numerator == cm[i, j].mul_monomial((1, -g.d[i], ()))


def test_ell_scaling_touches_one_factor():
    g = GCMS["B2"]
    a, b = ep_S_S(g, 0, 1, 1), ep_S_S(g, 0, 1, 2)
    assert a.numerator == b.numerator
    assert a.denom_factors[:-1] == b.denom_factors[:-1]
    assert a.denom_factors[-1] != b.denom_factors[-1]


def test_ell_must_be_positive():
    with pytest.raises(ValueError):
        ep_S_S(GCMS["A2"], 0, 0, 0)


def test_closed_form_rejects_undirected_factor():
    with pytest.raises(ValueError):
        ClosedForm(mono(), (make_monomial(q=-1),))


def test_serialization():
    d = ep_E_S(GCMS["A1"], 0, 0).to_dict()
    assert d["denominators"] == ["q^-4 t^4"] and d["directions"] == ["t"]


@pytest.mark.parametrize("name", FINITE)
def test_pbar_inverts_ep_matrix(name):
    g = GCMS[name]
    n, trunc = g.n, 16
    dims = pbar_graded_dims(g, trunc)
    es = [[ep_E_S(g, i, j).expand(trunc + 2) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            acc = LaurentPoly.zero()
            for k in range(n):
                acc = acc + poly_mul(dims[i][k].poly, es[k][j].poly, trunc - 1)
            assert acc == (1 if i == j else 0)
            assert dims[i][j].poly.is_nonnegative() or dims[i][j].poly.is_zero()


@pytest.mark.parametrize("name", FINITE)
def test_diagonal_first_order_term(name):
    # <E_i, S_i> starts with q^{-d_i} t C_ii whose t^0 part is 1
    g = GCMS[name]
    inv = invert_series(g, 4)
    for i in range(g.n):
        es = ep_E_S(g, i, i).expand(4).poly
        assert es.t_coefficient(0) == 1
        assert specialize(inv[i, i].poly, mu=True).t_coefficient(1) == mono(q=-g.d[i])


def test_ext_dim_window_a2():
    a2 = GCMS["A2"]
    assert ext_dim(a2, [0, 1], 0, 1, 1, 0, 10) == 0
    assert ext_dim(a2, [0, 1], 1, 0, 0, 0, 10) == 0
    assert ext_dim(a2, [0, 1], 0, 1, 0, 0, 10) == 1


def test_ext_dim_nonnegative():
    for name in ("A3", "F4", "A1(1)", "C14", "C69"):
        g = GCMS[name]
        xi = [k % 2 for k in range(g.n)]
        reader = ExtReader(g, xi, 12)
        for i in range(g.n):
            for j in range(g.n):
                for k in range(4):
                    for l in range(4):
                        m = (xi[i] + 2 * k) - (xi[j] + 2 * l) - 1
                        if m <= 12:
                            assert reader.ext_dim(i, k, j, l) >= 0


def test_ext_dim_truncation_error():
    with pytest.raises(TruncationError):
        ext_dim(GCMS["C69"], [0, 1], 0, 10, 1, 0, 5)
