"""Integer root-lattice combinatorics for a GCM.

Roots are integer tuples in the basis of simple roots and
``s_i(alpha_j) = alpha_j - c_ij alpha_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .cartan import CartanError, Gcm, topological_order

IntRoot = tuple[int, ...]


def simple_root(n: int, i: int) -> IntRoot:
    return tuple(int(k == i) for k in range(n))


def reflect(g: Gcm, i: int, v: Sequence[int]) -> IntRoot:
    """Apply ``s_i``: only the i-th coordinate changes."""
    shift = sum(g.c[i][j] * v[j] for j in range(g.n))
    out = list(v)
    out[i] -= shift
    return tuple(out)


def act(g: Gcm, word: Sequence[int], v: Sequence[int]) -> IntRoot:
    """Apply ``s_{w_1} s_{w_2} ... s_{w_l}`` to ``v`` (rightmost letter first)."""
    for i in reversed(word):
        v = reflect(g, i, v)
    return tuple(v)


def is_positive(v: Sequence[int]) -> bool:
    return all(x >= 0 for x in v) and any(v)


def is_negative(v: Sequence[int]) -> bool:
    return all(x <= 0 for x in v) and any(v)


def symmetrized_norm(g: Gcm, v: Sequence[int]) -> int:
    """``(v, v)`` for the form ``(alpha_i, alpha_j) = d_i c_ij``."""
    return sum(v[i] * v[j] * g.d[i] * g.c[i][j] for i in range(g.n) for j in range(g.n))


@dataclass(frozen=True)
class WeylWord:
    letters: tuple[int, ...]
    reduced: bool


def first_non_reduced_prefix(g: Gcm, letters: Sequence[int]) -> int | None:
    """Length of the shortest non-reduced prefix, or None if all prefixes are reduced.

    A prefix ``w s_i`` is reduced iff ``w`` is and ``w(alpha_i) > 0``.
    """
    letters = list(letters)
    # columns of the matrix of the running product, one per simple root
    cols = [simple_root(g.n, k) for k in range(g.n)]
    for pos, i in enumerate(letters):
        if not is_positive(cols[i]):
            return pos + 1
        cols = _right_mul_reflection(g, cols, i)
    return None


def _right_mul_reflection(g: Gcm, cols: list[IntRoot], i: int) -> list[IntRoot]:
    # (w s_i)(alpha_j) = w(alpha_j) - c_ij w(alpha_i)
    wi = cols[i]
    out = list(cols)
    for j in range(g.n):
        cij = g.c[i][j]
        if cij:
            out[j] = tuple(a - cij * b for a, b in zip(cols[j], wi))
    return out


def is_reduced_prefixwise(g: Gcm, letters: Sequence[int]) -> bool:
    return first_non_reduced_prefix(g, letters) is None


def weyl_word(g: Gcm, letters: Iterable[int]) -> WeylWord:
    letters = tuple(letters)
    return WeylWord(letters, is_reduced_prefixwise(g, letters))


def _require_finite(g: Gcm) -> None:
    if not g.is_finite:
        raise CartanError("root system not finite")


def positive_roots(g: Gcm) -> set[IntRoot]:
    _require_finite(g)
    start = [simple_root(g.n, i) for i in range(g.n)]
    seen = set(start)
    work = list(start)
    while work:
        v = work.pop()
        for i in range(g.n):
            w = reflect(g, i, v)
            if w not in seen and (is_positive(w) or is_negative(w)):
                seen.add(w)
                work.append(w)
    return {v for v in seen if is_positive(v)}


@dataclass(frozen=True)
class LongestElement:
    word: WeylWord
    star: tuple[int, ...]


def longest_and_star(g: Gcm) -> LongestElement:
    """Greedy reduced word for ``w0`` and the involution ``w0(alpha_i) = -alpha_{i*}``.

    Grows ``w`` on the right by the smallest ``s_i`` with ``w(alpha_i) > 0``
    until no such ``i`` exists.
    """
    _require_finite(g)
    letters: list[int] = []
    cols = [simple_root(g.n, k) for k in range(g.n)]
    while True:
        nxt = next((i for i in range(g.n) if is_positive(cols[i])), None)
        if nxt is None:
            break
        letters.append(nxt)
        cols = _right_mul_reflection(g, cols, nxt)
    star = []
    for i in range(g.n):
        neg = tuple(-x for x in cols[i])
        star.append(neg.index(1))
        if neg != simple_root(g.n, star[-1]):
            raise CartanError("w0 does not map simple roots to negative simple roots")
    return LongestElement(WeylWord(tuple(letters), True), tuple(star))


def coxeter_number(g: Gcm, orientation=None) -> int:
    """Order of the Coxeter element attached to the orientation, acting on the lattice."""
    _require_finite(g)
    order = topological_order(g, orientation)
    basis = [simple_root(g.n, k) for k in range(g.n)]
    cur = basis
    for h in range(1, 10 * g.n * g.n + 10):
        cur = [act(g, order, v) for v in cur]
        if cur == basis:
            return h
    raise CartanError("Coxeter element has no finite order")


def highest_short_root(g: Gcm) -> IntRoot:
    roots = positive_roots(g)
    short = min(symmetrized_norm(g, v) for v in roots)
    cands = [v for v in roots if symmetrized_norm(g, v) == short]
    return max(cands, key=sum)


def dual_coxeter_number(g: Gcm) -> int:
    """``1 +`` sum of the comarks.

    The highest coroot is the highest short root of the dual system, whose
    Cartan matrix is the transpose; its coordinates are in simple coroots.
    """
    _require_finite(g)
    return 1 + sum(highest_short_root(g.transpose()))


@dataclass(frozen=True)
class CoxeterData:
    h: int
    h_dual: int


def coxeter_data(g: Gcm, orientation=None) -> CoxeterData:
    return CoxeterData(coxeter_number(g, orientation), dual_coxeter_number(g))
