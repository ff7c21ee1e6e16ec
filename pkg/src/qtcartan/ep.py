"""Closed-form Euler-Poincare pairings, the t = 1 regrading, and Ext dimensions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .braid import (
    InverseResult,
    TruncatedSeries,
    check_height,
    extract_longest_monomial,
    invert_bipartite,
    invert_series,
    path_mu,
)
from .cartan import Gcm, deformed_cartan
from .gamma import (
    GammaMonomial,
    LaurentPoly,
    make_monomial,
    monomial_mul,
    poly_mul,
    render_monomial,
    render_poly,
    specialize,
)
from .weyl import coxeter_number


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class ClosedForm:
    """``numerator * prod_k (1 - gamma_k)^{-1}`` with symbolic denominators.

    Each factor is expanded as a geometric series; a factor with positive
    t-exponent is expanded t-adically, a t-free factor with positive
    q-exponent q-adically.
    """

    numerator: LaurentPoly
    denom_factors: tuple[GammaMonomial, ...] = ()

    def __post_init__(self):
        for gam in self.denom_factors:
            if gam.t_exp <= 0 and not (gam.t_exp == 0 and gam.q_exp > 0):
                raise ValueError(f"no expansion direction for 1 - {render_monomial(gam)}")

    @property
    def directions(self) -> tuple[str, ...]:
        return tuple("t" if gam.t_exp > 0 else "q" for gam in self.denom_factors)

    def expand(self, trunc: int, q_terms: int = 0) -> TruncatedSeries:
        """t-adic expansion through ``t^trunc``.

        t-free factors are summed to ``q_terms`` extra powers only, so the
        result is a partial sum in the q-direction.
        """
        out = self.numerator
        for gam in self.denom_factors:
            if not out:
                break
            if gam.t_exp > 0:
                steps = max(0, (trunc - int(out.t_valuation())) // gam.t_exp) + 1
            else:
                steps = q_terms + 1
            geo = LaurentPoly.zero()
            power = (0, 0, ())
            for _ in range(steps):
                geo = geo + LaurentPoly.from_monomial(power)
                power = monomial_mul(power, gam)
            out = poly_mul(out, geo, trunc)
        return TruncatedSeries(out, trunc)

    def __str__(self) -> str:
        dens = ", ".join(f"(1 - {render_monomial(g)})" for g in self.denom_factors)
        return f"numerator: {render_poly(self.numerator)}; denominators: [{dens}]; directions: {list(self.directions)}"

    def to_dict(self) -> dict:
        return {
            "numerator": render_poly(self.numerator),
            "denominators": [render_monomial(g) for g in self.denom_factors],
            "directions": list(self.directions),
        }


def ep_E_S(g: Gcm, i: int, j: int) -> ClosedForm:
    """``<E_i, S_j>`` for the generalized preprojective algebra."""
    cm = deformed_cartan(g)
    pref = make_monomial(q=-g.d[i], t=1)
    if not g.is_finite:
        return ClosedForm(cm[i, j].mul_monomial(pref))
    lm = extract_longest_monomial(g)
    istar = lm.nu_perm[i]
    shift = make_monomial(q=-lm.rh_dual, t=lm.h)
    twist = monomial_mul(shift, path_mu(g, i, istar))
    num = cm[i, j] - cm[istar, j].mul_monomial(twist)
    denom = make_monomial(q=-2 * lm.rh_dual, t=2 * lm.h)
    return ClosedForm(num.mul_monomial(pref), (denom,))


def ep_S_S(g: Gcm, i: int, j: int, ell: int) -> ClosedForm:
    """``<S_i, S_j> = (1 - q^{2 d_i}) / (1 - q^{2 r ell}) <E_i, S_j>``."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    base = ep_E_S(g, i, j)
    num = base.numerator - base.numerator.mul_monomial((0, 2 * g.d[i], ()))
    return ClosedForm(num, base.denom_factors + (make_monomial(q=2 * g.r * ell),))


def ep_matrix(g: Gcm, trunc: int) -> list[list[TruncatedSeries]]:
    return [[ep_E_S(g, i, j).expand(trunc) for j in range(g.n)] for i in range(g.n)]


def pbar_graded_dims(g: Gcm, trunc: int, inverse: InverseResult | None = None) -> list[list[TruncatedSeries]]:
    """Series for ``dim e_i Pbar_j`` read off the inverse matrix.

    These are the entries of the inverse of the ``<E_i, S_j>`` matrix:
    ``(C~_ij + gamma mu_{j* j} C~_{i j*}) q^{d_j} t^{-1}`` with
    ``gamma = q^{-r h^vee} t^h`` in finite type and ``gamma = 0`` otherwise.
    The result is known through ``t^{trunc - 1}``.
    """
    inv = inverse or invert_series(g, trunc)
    n = g.n
    out = []
    if g.is_finite:
        lm = extract_longest_monomial(g)
        shift = make_monomial(q=-lm.rh_dual, t=lm.h)
    for i in range(n):
        row = []
        for j in range(n):
            p = inv[i, j].poly
            if g.is_finite:
                js = lm.nu_perm[j]
                p = p + inv[i, js].poly.mul_monomial(monomial_mul(shift, path_mu(g, js, j)))
            p = p.mul_monomial((-1, g.d[j], ()))
            row.append(TruncatedSeries(p, inv.trunc - 1))
        out.append(row)
    return out


# -- t = 1 evaluation --------------------------------------------------------

def evaluate_t_at_one(res: InverseResult) -> list[list[LaurentPoly]]:
    """Evaluate the inverse at ``t = 1`` as a ``q^{-1}``-adic series.

    Only defined when every adjacent pair has ``f_ij = 1`` or ``f_ji = 1``.
    Then each term ``q^a t^b`` of row ``i`` satisfies ``a + b <= 1 - d_i``, so
    the terms beyond the t-truncation only reach ``q``-exponents
    ``<= -trunc - d_i``; the coefficients of ``q^a`` for ``a > -trunc - d_i``
    are therefore exact and are the ones returned.
    """
    g = res.gcm
    if not g.satisfies_condf():
        raise ValueError("t-evaluation undefined: some edge has f_ij > 1 and f_ji > 1")
    out = []
    for i in range(g.n):
        floor = -res.trunc - g.d[i]
        row = []
        for j in range(g.n):
            p = res[i, j].poly
            for m in p.terms:
                if m[1] + m[0] > 1 - g.d[i]:
                    raise AssertionError("regrading bound violated")
            row.append(LaurentPoly({(0, m[1], m[2]): c for m, c in specialize(p, t=True).terms.items()
                                    if m[1] > floor}))
        out.append(row)
    return out


def regrade_q_to_qt(p: LaurentPoly) -> LaurentPoly:
    """Substitute ``q -> q t^{-1}`` in a t-free polynomial."""
    return p.map_monomials(lambda m: (m[0] - m[1], m[1], m[2]))


# -- Ext dimensions of preprojective modules ---------------------------------

@dataclass
class ExtReader:
    """Caches the specialized inverse ``d_i C~_ij(1, t)`` for repeated reads."""

    g: Gcm
    xi: Sequence[int]
    trunc: int
    _table: list[list[LaurentPoly]] = field(default=None, repr=False)

    def __post_init__(self):
        check_height(self.g, self.xi)
        self.h = coxeter_number(self.g) if self.g.is_finite else None

    def table(self) -> list[list[LaurentPoly]]:
        if self._table is None:
            res = invert_bipartite(self.g, self.xi, self.trunc)
            self._table = [
                [specialize(res[i, j].poly, mu=True, q=True) * self.g.d[i] for j in range(self.g.n)]
                for i in range(self.g.n)
            ]
        return self._table

    def ext_dim(self, i: int, k: int, j: int, l: int) -> int:
        if k < 0 or l < 0:
            raise ValueError("translate indices must be nonnegative")
        m = (self.xi[i] + 2 * k) - (self.xi[j] + 2 * l) - 1
        if m <= 0:
            return 0
        if self.g.is_finite and m > self.h - 1:
            return 0
        if m > self.trunc:
            raise TruncationError(f"increase truncation: need t^{m}, have t^{self.trunc}")
        return self.table()[i][j].coefficient((m, 0, ()))


def ext_dim(g: Gcm, xi: Sequence[int], i: int, k: int, j: int, l: int, trunc: int) -> int:
    """``dim Ext^1(tau^{-k} P_i, tau^{-l} P_j)`` over the modulated graph of ``(C, D, Omega_xi)``."""
    return ExtReader(g, xi, trunc).ext_dim(i, k, j, l)


__all__ = [
    "ClosedForm", "ExtReader", "TruncationError", "ep_E_S", "ep_S_S", "evaluate_t_at_one",
    "ext_dim", "pbar_graded_dims", "regrade_q_to_qt",
]
