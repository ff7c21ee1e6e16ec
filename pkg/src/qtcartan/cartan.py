"""Generalized Cartan matrices, their deformations, and the Kimura-Pestun comparison."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import yaml

from .gamma import LaurentPoly, q_integer, specialize


class ParseError(ValueError):
    """Input text or structure that cannot be read as a GCM description."""


class CartanError(ValueError):
    """Invalid GCM, symmetrizer, orientation or quiver input."""


Pair = tuple[int, int]


def _leading_minors_positive(m: list[list[int]]) -> bool:
    n = len(m)
    for k in range(1, n + 1):
        if _det([row[:k] for row in m[:k]]) <= 0:
            return False
    return True


def _det(m: list[list[int]]) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return det


def _is_acyclic(n: int, arcs: Sequence[Pair]) -> bool:
    indeg = [0] * n
    out: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in arcs:
        out[i].append(j)
        indeg[j] += 1
    stack = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while stack:
        i = stack.pop()
        seen += 1
        for j in out[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                stack.append(j)
    return seen == n


@dataclass(frozen=True)
class Gcm:
    """A validated irreducible symmetrizable GCM with a symmetrizer.

    ``orientation`` is the acyclic orientation used both as the default
    for the Coxeter-type algorithms and as the normal form for the mass
    parameters (``mu_ji`` is stored as ``mu_ij^{-1}`` for ``(i, j)`` in it).
    """

    c: tuple[tuple[int, ...], ...]
    d: tuple[int, ...]
    orientation: tuple[Pair, ...]
    type_class: str

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def is_finite(self) -> bool:
        return self.type_class == "finite"

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and self.c[i][j] < 0

    def neighbors(self, i: int) -> list[int]:
        return [j for j in range(self.n) if self.adjacent(i, j)]

    @cached_property
    def edges(self) -> list[Pair]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.c[i][j] < 0]

    def g(self, i: int, j: int) -> int:
        return math.gcd(-self.c[i][j], -self.c[j][i])

    def f(self, i: int, j: int) -> int:
        return -self.c[i][j] // self.g(i, j)

    def d_gcd(self, i: int, j: int) -> int:
        return math.gcd(self.d[i], self.d[j])

    @property
    def r(self) -> int:
        return math.lcm(*self.d)

    @cached_property
    def _oriented(self) -> frozenset:
        return frozenset(self.orientation)

    def mu_key(self, i: int, j: int, g: int) -> tuple[tuple[int, int, int], int]:
        """Normal-form key and exponent for ``mu_ij^(g)``."""
        if (i, j) in self._oriented:
            return (i, j, g), 1
        return (j, i, g), -1

    def mu(self, i: int, j: int, g: int = 1) -> LaurentPoly:
        key, e = self.mu_key(i, j, g)
        return LaurentPoly.monomial(mu={key: e})

    def mu_sum(self, i: int, j: int) -> LaurentPoly:
        return sum((self.mu(i, j, g) for g in range(1, self.g(i, j) + 1)), LaurentPoly.zero())

    def satisfies_condf(self) -> bool:
        return all(self.f(i, j) == 1 or self.f(j, i) == 1 for i, j in self.edges)

    def with_orientation(self, orientation: Sequence[Pair]) -> Gcm:
        return validate_and_derive(self.c, self.d, orientation)

    def transpose(self) -> Gcm:
        ct = [[self.c[j][i] for j in range(self.n)] for i in range(self.n)]
        return validate_and_derive(ct)

    def __str__(self) -> str:
        return f"Gcm(c={[list(r) for r in self.c]}, d={list(self.d)}, {self.type_class})"


def minimal_symmetrizer(c: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Solve ``d_i c_ij = d_j c_ji`` along a spanning tree and normalise to gcd 1."""
    n = len(c)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in range(n):
            if j != i and c[i][j] < 0 and d[j] is None:
                d[j] = d[i] * c[i][j] / c[j][i]
                queue.append(j)
    if any(x is None for x in d):
        raise CartanError("matrix is reducible (adjacency graph not connected)")
    for i in range(n):
        for j in range(n):
            if d[i] * c[i][j] != d[j] * c[j][i]:
                raise CartanError(f"matrix is not symmetrizable (fails at pair ({i + 1},{j + 1}))")
    den = math.lcm(*(x.denominator for x in d))
    ints = [int(x * den) for x in d]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def validate_and_derive(
    c: Sequence[Sequence[int]],
    d: Sequence[int] | None = None,
    orientation: Sequence[Pair] | None = None,
) -> Gcm:
    """Check C1, C2 and irreducibility; fill in symmetrizer, orientation and type."""
    try:
        c = tuple(tuple(int(x) for x in row) for row in c)
    except (TypeError, ValueError) as exc:
        raise CartanError(f"cartan matrix must be an integer matrix: {exc}") from None
    n = len(c)
    if n == 0 or any(len(row) != n for row in c):
        raise CartanError("cartan matrix must be square and nonempty")
    for i in range(n):
        if c[i][i] != 2:
            raise CartanError(f"diagonal entry c_{i + 1}{i + 1} = {c[i][i]} is not 2")
        for j in range(n):
            if i != j:
                if c[i][j] > 0:
                    raise CartanError(f"off-diagonal entry c_{i + 1}{j + 1} = {c[i][j]} is positive")
                if (c[i][j] == 0) != (c[j][i] == 0):
                    raise CartanError(f"c_{i + 1}{j + 1} and c_{j + 1}{i + 1} must vanish together")
    minimal = minimal_symmetrizer(c)
    if d is None:
        d = minimal
    else:
        d = tuple(int(x) for x in d)
        if len(d) != n or any(x <= 0 for x in d):
            raise CartanError("symmetrizer must have one positive integer per vertex")
        for i in range(n):
            for j in range(n):
                if d[i] * c[i][j] != d[j] * c[j][i]:
                    raise CartanError(
                        f"symmetrizer fails d_i c_ij = d_j c_ji at ({i + 1},{j + 1})")
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if c[i][j] < 0]
    if orientation is None:
        orientation = edges
    else:
        orientation = [tuple(int(x) for x in arc) for arc in orientation]
        covered = sorted(tuple(sorted(a)) for a in orientation)
        if covered != sorted(edges):
            raise CartanError("orientation must contain each adjacent pair exactly once")
        if not _is_acyclic(n, orientation):
            raise CartanError("orientation has a directed cycle")
    sym = [[d[i] * c[i][j] for j in range(n)] for i in range(n)]
    type_class = "finite" if _leading_minors_positive(sym) else "infinite"
    return Gcm(c=c, d=d, orientation=tuple(tuple(a) for a in orientation), type_class=type_class)


def topological_order(g: Gcm, orientation: Sequence[Pair] | None = None) -> list[int]:
    """An ordering compatible with the orientation, smallest index first on ties."""
    arcs = g.orientation if orientation is None else orientation
    indeg = [0] * g.n
    for _, j in arcs:
        indeg[j] += 1
    order: list[int] = []
    done = set()
    while len(order) < g.n:
        nxt = min(i for i in range(g.n) if i not in done and indeg[i] == 0)
        order.append(nxt)
        done.add(nxt)
        for i, j in arcs:
            if i == nxt:
                indeg[j] -= 1
    return order


def compatible_orders(g: Gcm, orientation: Sequence[Pair] | None = None) -> list[list[int]]:
    """Every total ordering compatible with the orientation (small ranks only)."""
    from itertools import permutations

    arcs = g.orientation if orientation is None else orientation
    out = []
    for perm in permutations(range(g.n)):
        pos = {v: k for k, v in enumerate(perm)}
        if all(pos[i] < pos[j] for i, j in arcs):
            out.append(list(perm))
    return out


def acyclic_orientations(g: Gcm) -> list[list[Pair]]:
    from itertools import product

    out = []
    for flips in product((False, True), repeat=len(g.edges)):
        arcs = [(j, i) if f else (i, j) for (i, j), f in zip(g.edges, flips)]
        if _is_acyclic(g.n, arcs):
            out.append(arcs)
    return out


@dataclass(frozen=True)
class DeformedMatrix:
    entries: tuple[tuple[LaurentPoly, ...], ...]
    gcm: Gcm

    def __getitem__(self, ij: Pair) -> LaurentPoly:
        i, j = ij
        return self.entries[i][j]

    def specialize(self, **kw) -> list[list[LaurentPoly]]:
        return [[specialize(x, **kw) for x in row] for row in self.entries]


def deformed_entry(g: Gcm, i: int, j: int, t_one: bool = False) -> LaurentPoly:
    """Entry ``C_ij(q,t,mu)``; with ``t_one`` the t-free ``C_ij(q,1,mu)``."""
    if i == j:
        if t_one:
            return LaurentPoly.monomial(q=g.d[i]) + LaurentPoly.monomial(q=-g.d[i])
        return LaurentPoly.monomial(q=g.d[i], t=-1) + LaurentPoly.monomial(q=-g.d[i], t=1)
    if g.c[i][j] < 0:
        return -(q_integer(g.f(i, j), g.d[i]) * g.mu_sum(i, j))
    return LaurentPoly.zero()


def deformed_cartan(g: Gcm) -> DeformedMatrix:
    rows = tuple(tuple(deformed_entry(g, i, j) for j in range(g.n)) for i in range(g.n))
    return DeformedMatrix(rows, g)


def determinant(m: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Cofactor expansion; fine for the small ranks handled here."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = LaurentPoly.zero()
    for k in range(n):
        if not m[0][k]:
            continue
        minor = [row[:k] + row[k + 1:] for row in m[1:]]
        term = m[0][k] * determinant(minor)
        total = total + (term if k % 2 == 0 else -term)
    return total


# -- Kimura-Pestun mass-deformed Cartan matrix ------------------------------

class KPPoly:
    """Laurent polynomial in ``q1, q2`` and one mass parameter per quiver edge.

    Keys are dense exponent tuples ``(q1, q2, m_0, ..., m_{E-1})``.
    """

    __slots__ = ("n_edges", "terms")

    def __init__(self, n_edges: int, terms: dict[tuple[int, ...], int] | None = None):
        self.n_edges = n_edges
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def mono(cls, n_edges: int, q1: int = 0, q2: int = 0, edge: int | None = None,
             edge_exp: int = 0, coeff: int = 1) -> KPPoly:
        key = [q1, q2] + [0] * n_edges
        if edge is not None:
            key[2 + edge] = edge_exp
        return cls(n_edges, {tuple(key): coeff})

    def __add__(self, other: KPPoly) -> KPPoly:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return KPPoly(self.n_edges, out)

    def __neg__(self) -> KPPoly:
        return KPPoly(self.n_edges, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: KPPoly) -> KPPoly:
        return self + (-other)

    def __mul__(self, other: KPPoly) -> KPPoly:
        out: dict[tuple[int, ...], int] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + va * vb
        return KPPoly(self.n_edges, out)

    def __eq__(self, other) -> bool:
        return isinstance(other, KPPoly) and self.terms == other.terms

    __hash__ = None

    def evaluate_at_one(self) -> int:
        return sum(self.terms.values())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ["q1", "q2"] + [f"m{e + 1}" for e in range(self.n_edges)]
        parts = []
        for k in sorted(self.terms):
            v = self.terms[k]
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e]
            mono = " ".join(factors) or "1"
            if mono == "1":
                body = str(abs(v))
            else:
                body = mono if abs(v) == 1 else f"{abs(v)} {mono}"
            parts.append(("-" if v < 0 else "+") + " " + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def default_quiver(g: Gcm) -> list[Pair]:
    """``g_ij`` parallel edges per adjacent pair, pointing from the orientation source."""
    return [(i, j) for i, j in g.orientation for _ in range(g.g(i, j))]


def check_fractional_quiver(g: Gcm, edges: Sequence[Pair]) -> None:
    for s, t in edges:
        if s == t:
            raise CartanError("fractional quiver may not contain loops")
        if not (0 <= s < g.n and 0 <= t < g.n):
            raise CartanError(f"quiver edge ({s + 1},{t + 1}) out of range")
    for i in range(g.n):
        for j in range(g.n):
            if i == j:
                continue
            count = sum(1 for e in edges if set(e) == {i, j})
            expected = -(g.d[j] // g.d_gcd(i, j)) * count
            if g.c[i][j] != expected:
                raise CartanError(
                    f"quiver is not of type C at ({i + 1},{j + 1}): "
                    f"c_ij = {g.c[i][j]} but edges give {expected}")


def kp_matrix(g: Gcm, edges: Sequence[Pair] | None = None) -> list[list[KPPoly]]:
    """The mass-deformed Cartan matrix of a fractional quiver of type ``g``.

    Edges are ``(source, target)`` pairs; edge ``e`` carries mass ``m_{e+1}``.
    """
    edges = list(default_quiver(g) if edges is None else edges)
    check_fractional_quiver(g, edges)
    ne = len(edges)
    rows = []
    for i in range(g.n):
        row = []
        for j in range(g.n):
            entry = KPPoly(ne)
            if i == j:
                entry = KPPoly.mono(ne) + KPPoly.mono(ne, q1=-g.d[i], q2=-1)
            else:
                dij = g.d_gcd(i, j)
                ratio = KPPoly(ne)
                for k in range(g.d[j] // dij):
                    ratio = ratio + KPPoly.mono(ne, q1=-k * dij)
                masses = KPPoly(ne)
                for e, (s, t) in enumerate(edges):
                    if (s, t) == (i, j):
                        masses = masses + KPPoly.mono(ne, edge=e, edge_exp=-1)
                    elif (s, t) == (j, i):
                        masses = masses + KPPoly.mono(ne, q1=-dij, q2=-1, edge=e, edge_exp=1)
                entry = -(ratio * masses)
            row.append(entry)
        rows.append(row)
    return rows


def kp_transform(g: Gcm, p: KPPoly, edges: Sequence[Pair]) -> LaurentPoly:
    """Monomial change of variables q1 -> q^2, q2 -> t^-2, m_e -> q^{d_ij} t^-1 mu_ij^(g(e)).

    ``i`` is the target and ``j`` the source of ``e``; ``g(e)`` numbers the
    parallel edges between ``{i, j}`` in input order.
    """
    labels = []
    seen: dict[frozenset, int] = {}
    for s, t in edges:
        k = frozenset((s, t))
        seen[k] = seen.get(k, 0) + 1
        labels.append(seen[k])
    images = []
    for (s, t), lab in zip(edges, labels):
        i, j = t, s
        images.append((g.d_gcd(i, j), g.mu_key(i, j, lab)))
    out = LaurentPoly.zero()
    for key, coeff in p.terms.items():
        e1, e2, *es = key
        q_exp, t_exp, mu = 2 * e1, -2 * e2, {}
        for (dij, (mk, sign)), e in zip(images, es):
            if e:
                q_exp += dij * e
                t_exp -= e
                mu[mk] = mu.get(mk, 0) + sign * e
        out = out + LaurentPoly.monomial(q=q_exp, t=t_exp, mu=mu, coeff=coeff)
    return out


@dataclass
class KPReport:
    condf: bool
    transformed: list[list[LaurentPoly]]
    reference: list[list[LaurentPoly]]
    equal: bool
    mismatches: list[Pair] = field(default_factory=list)


def kp_compare(g: Gcm, edges: Sequence[Pair] | None = None) -> KPReport:
    """Transform the KP matrix and compare it with ``C(q,t,mu) q^{-D} t``."""
    edges = list(default_quiver(g) if edges is None else edges)
    kp = kp_matrix(g, edges)
    cm = deformed_cartan(g)
    transformed, reference, bad = [], [], []
    for i in range(g.n):
        trow, rrow = [], []
        for j in range(g.n):
            tr = kp_transform(g, kp[i][j], edges)
            ref = cm[i, j].mul_monomial((1, -g.d[j], ()))
            trow.append(tr)
            rrow.append(ref)
            if tr != ref:
                bad.append((i, j))
        transformed.append(trow)
        reference.append(rrow)
    return KPReport(g.satisfies_condf(), transformed, reference, not bad, bad)


# -- input files ------------------------------------------------------------

@dataclass
class GcmInput:
    gcm: Gcm
    height: list[int] | None = None
    quiver_edges: list[Pair] | None = None


def _pairs(raw, what: str) -> list[Pair]:
    try:
        out = [(int(a) - 1, int(b) - 1) for a, b in raw]
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a list of 1-based index pairs") from None
    return out


def parse_gcm_document(doc) -> GcmInput:
    """Build a GcmInput from a parsed mapping (1-based indices)."""
    if not isinstance(doc, dict) or "cartan" not in doc:
        raise ParseError("input must be a mapping with a 'cartan' field")
    known = {"cartan", "symmetrizer", "orientation", "height", "quiver_edges"}
    extra = set(doc) - known
    if extra:
        raise ParseError(f"unknown input fields: {sorted(extra)}")
    orientation = doc.get("orientation")
    if orientation is not None:
        orientation = _pairs(orientation, "orientation")
    gcm = validate_and_derive(doc["cartan"], doc.get("symmetrizer"), orientation)
    height = doc.get("height")
    if height is not None:
        try:
            height = [int(x) for x in height]
        except (TypeError, ValueError):
            raise ParseError("height must be a list of integers") from None
        if len(height) != gcm.n:
            raise CartanError("height must have one integer per vertex")
    edges = doc.get("quiver_edges")
    if edges is not None:
        edges = _pairs(edges, "quiver_edges")
        check_fractional_quiver(gcm, edges)
    return GcmInput(gcm, height, edges)


def load_gcm_file(path: str | Path) -> GcmInput:
    """Read a YAML (or JSON) GCM description."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"could not parse {path}: {exc}") from None
    return parse_gcm_document(doc)
