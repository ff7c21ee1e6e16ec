"""Reference values computed independently of the package's ring arithmetic.

Everything here goes through sympy (rational functions, series) or through
tables of classical Lie-theoretic constants, never through qtcartan.gamma.
"""

from __future__ import annotations

import sympy as sp

q, t = sp.symbols("q t")

BATTERY = {
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "G2": [[2, -3], [-1, 2]],
    "F4": [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -2, 2, -1], [0, 0, -1, 2]],
    "A1(1)": [[2, -2], [-2, 2]],
    "C14": [[2, -1], [-4, 2]],
    "C69": [[2, -6], [-9, 2]],
}
FINITE = ("A1", "A2", "A3", "B2", "G2", "F4")
INFINITE = ("A1(1)", "C14", "C69")

# (h, h_dual, r) from the classification tables
COXETER_TABLE = {
    "A1": (2, 2, 1),
    "A2": (3, 3, 1),
    "A3": (4, 4, 1),
    "B2": (4, 3, 2),
    "G2": (6, 4, 3),
    "F4": (12, 9, 2),
}
POSITIVE_ROOT_COUNT = {"A1": 1, "A2": 3, "A3": 6, "B2": 4, "G2": 6, "F4": 24}

# numerators of the F4 inverse, i <= j, 1-based, d = (2, 2, 1, 1)
F4_F = {
    (1, 1): q**7 * t**-5 + q * t**-1,
    (1, 2): q**5 * t**-4 + q**3 * t**-2 + q,
    (1, 3): q**4 * t**-3 + q**2 * t**-1,
    (1, 4): q**3 * t**-2,
    (2, 2): q**7 * t**-5 + (q**5 + q**3) * t**-3 + (q**3 + 2 * q) * t**-1,
    (2, 3): q**6 * t**-4 + (q**4 + q**2) * t**-2 + 1,
    (2, 4): q**5 * t**-3 + q * t**-1,
    (3, 3): q**8 * t**-5 + (q**6 + q**4) * t**-3 + (2 * q**2 + 1) * t**-1,
    (3, 4): q**7 * t**-4 + q**3 * t**-2 + q,
    (4, 4): q**8 * t**-5 + q**2 * t**-1,
}
F4_D = (2, 2, 1, 1)
# the (3,3) numerator is also found listed with (2q + 1) t^-1; that variant
# does not invert C (see test_acceptance), the entry above does
F4_F33_VARIANT = q**8 * t**-5 + (q**6 + q**4) * t**-3 + (2 * q + 1) * t**-1


def sym_to_terms(expr, trunc: int | None = None) -> dict[tuple[int, int], int]:
    """``{(t_exp, q_exp): coeff}`` of a Laurent polynomial in q, t."""
    expr = sp.expand(expr)
    out: dict[tuple[int, int], int] = {}
    for term in sp.Add.make_args(expr):
        if term == 0:
            continue
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict()
        te, qe = int(powers.get(t, 0)), int(powers.get(q, 0))
        if trunc is not None and te > trunc:
            continue
        out[(te, qe)] = out.get((te, qe), 0) + int(coeff)
    return {k: v for k, v in out.items() if v}


def qint(k: int, d: int = 1):
    return sum(q ** (d * (k - 1 - 2 * m)) for m in range(k))


def f4_closed_form(i: int, j: int, f=None):
    """Rational C~_ij for F4, 1-based, i <= j."""
    f = F4_F[(i, j)] if f is None else f
    num = f + f.subs({q: 1 / q, t: 1 / t}, simultaneous=True)
    return num / (q**9 * t**-6 + q**-9 * t**6)


def mu_one_matrix(c, d):
    """C(q, t) with every mass parameter set to 1."""
    from math import gcd

    n = len(c)
    m = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            if i == j:
                m[i, j] = q ** d[i] / t + t / q ** d[i]
            elif c[i][j]:
                g = gcd(c[i][j], c[j][i])
                m[i, j] = -g * qint(-c[i][j] // g, d[i])
    return m


def f4_inverts(f33=None) -> bool:
    """Does the closed-form table (with the given (3,3) numerator) satisfy C C~ = 1?"""
    ct = sp.zeros(4, 4)
    for (i, j) in F4_F:
        e = f4_closed_form(i, j, f33 if (i, j) == (3, 3) else None)
        ct[i - 1, j - 1] = e
        if i != j:
            ct[j - 1, i - 1] = qint(F4_D[i - 1]) * e / qint(F4_D[j - 1])
    prod = mu_one_matrix(BATTERY["F4"], F4_D) * ct
    return all(sp.cancel(prod[a, b] - int(a == b)) == 0 for a in range(4) for b in range(4))


def f4_expected(trunc: int) -> dict[tuple[int, int], dict]:
    """t-adic expansion of the F4 closed forms (0-based entries)."""
    # 1 / (q^9 t^-6 + q^-9 t^6) = q^-9 t^6 / (1 + q^-18 t^12)
    kmax = trunc // 12 + 2
    geo = q**-9 * t**6 * sum((-(q**-18) * t**12) ** k for k in range(kmax))
    upper = {}
    for (i, j), f in F4_F.items():
        num = f + f.subs({q: 1 / q, t: 1 / t}, simultaneous=True)
        upper[(i - 1, j - 1)] = sp.expand(num * geo)
    out = {}
    for (i, j), e in upper.items():
        out[(i, j)] = sym_to_terms(e, trunc)
        if i != j:
            # [d_j] C~_ji = [d_i] C~_ij
            lower = sp.cancel(qint(F4_D[i]) * e / qint(F4_D[j]))
            out[(j, i)] = sym_to_terms(lower, trunc)
    return out


def inverse_series_mu_one(c, d, trunc: int) -> dict[tuple[int, int], dict]:
    """Series of ``C(q,t)^{-1}`` at mu = 1 via sympy's rational inverse.

    Uses the undeformed-mass matrix with entries ``q^{d_i} t^-1 + q^{-d_i} t`` on
    the diagonal and ``-[f_ij]_{q^{d_i}} g_ij`` off it.
    """
    n = len(c)
    inv = mu_one_matrix(c, d).inv()
    out = {}
    for i in range(n):
        for j in range(n):
            s = sp.series(sp.cancel(inv[i, j]), t, 0, trunc + 1).removeO()
            out[(i, j)] = sym_to_terms(s, trunc)
    return out


def a11_determinant():
    """Determinant of the deformed affine A1 matrix with masses m1, m2."""
    m1, m2 = sp.symbols("m1 m2")
    diag = q / t + t / q
    mat = sp.Matrix([[diag, -(m1 + m2)], [-(1 / m1 + 1 / m2), diag]])
    return sp.expand(mat.det()), (m1, m2)
