"""Exact arithmetic in the group ring Z[Gamma].

Gamma is the free abelian group on ``q``, ``t`` and the mass parameters
``mu_ij^(g)``.  The relation ``mu_ij^(g) mu_ji^(g) = 1`` is built into the
data: every mass parameter is stored under the key ``(i, j, g)`` where
``(i, j)`` belongs to a fixed orientation, so ``mu_ji^(g)`` is simply the
exponent ``-1`` on that key.  Indices are 0-based internally and rendered
1-based.

Internally a monomial is packed into one integer: the exponent vector is
read as balanced digits in base ``2**SLOT_BITS`` (slot 0 is ``t``, slot 1 is
``q``, later slots are mass keys in order of first use), so multiplying
monomials is integer addition.  The public face of a monomial is the
``GammaMonomial`` named tuple, whose natural ordering is the global term
order (t, then q, then lexicographic mu).
"""

from __future__ import annotations

import math
import threading
from typing import Iterator, Mapping, NamedTuple

MuKey = tuple[int, int, int]
MuPart = tuple[tuple[MuKey, int], ...]

SLOT_BITS = 24
_BASE = 1 << SLOT_BITS
_HALF = _BASE >> 1
_MASK = _BASE - 1


class GammaMonomial(NamedTuple):
    """A monomial ``t^t_exp q^q_exp prod mu^e`` in canonical form."""

    t_exp: int
    q_exp: int
    mu: MuPart = ()

    @property
    def mu_exp(self) -> dict[MuKey, int]:
        return dict(self.mu)

    def __str__(self) -> str:
        return render_monomial(self)


ONE_MONOMIAL = GammaMonomial(0, 0, ())


class _SlotRegistry:
    """Append-only assignment of packing slots to mass keys."""

    def __init__(self):
        self._slot: dict[MuKey, int] = {}
        self._keys: list[MuKey] = []
        self._lock = threading.Lock()

    def slot(self, key: MuKey) -> int:
        s = self._slot.get(key)
        if s is None:
            with self._lock:
                s = self._slot.get(key)
                if s is None:
                    s = len(self._keys) + 2
                    self._keys.append(key)
                    self._slot[key] = s
        return s

    def key(self, slot: int) -> MuKey:
        return self._keys[slot - 2]


_REGISTRY = _SlotRegistry()


def _check_exp(e: int) -> int:
    if not -_HALF < e < _HALF:
        raise OverflowError(f"exponent {e} exceeds the packed range")
    return e


def encode(m) -> int:
    """Pack a ``(t_exp, q_exp, mu)`` triple into an integer key."""
    t_exp, q_exp, mu = m
    key = _check_exp(t_exp) + (_check_exp(q_exp) << SLOT_BITS)
    for k, e in mu:
        if e:
            key += _check_exp(e) << (SLOT_BITS * _REGISTRY.slot(tuple(k)))
    return key


def _bal(x: int) -> int:
    return ((x + _HALF) & _MASK) - _HALF


def key_t(key: int) -> int:
    return ((key + _HALF) & _MASK) - _HALF


def _key_low(key: int) -> tuple[int, int, int]:
    """``(t, q, t + q * base)`` for a packed key."""
    t = _bal(key)
    rest = (key - t) >> SLOT_BITS
    q = _bal(rest)
    return t, q, t + (q << SLOT_BITS)


def decode(key: int) -> GammaMonomial:
    t = _bal(key)
    key = (key - t) >> SLOT_BITS
    q = _bal(key)
    key = (key - q) >> SLOT_BITS
    mu = []
    slot = 2
    while key:
        e = _bal(key)
        if e:
            mu.append((_REGISTRY.key(slot), e))
        key = (key - e) >> SLOT_BITS
        slot += 1
    return GammaMonomial(t, q, tuple(sorted(mu)))


def make_monomial(q: int = 0, t: int = 0, mu: Mapping[MuKey, int] | None = None) -> GammaMonomial:
    acc: dict[MuKey, int] = {}
    for k, e in (mu or {}).items():
        acc[tuple(k)] = acc.get(tuple(k), 0) + e
    return GammaMonomial(t, q, tuple(sorted((k, e) for k, e in acc.items() if e)))


def monomial_mul(a, b) -> GammaMonomial:
    return decode(encode(a) + encode(b))


def monomial_inv(a) -> GammaMonomial:
    return decode(-encode(a))


def _power(var: str, e: int) -> str:
    return var if e == 1 else f"{var}^{e}"


def render_monomial(m) -> str:
    """Canonical string ``q^a t^b u[i,j,g]^e ...`` (1-based, exponent 1 elided)."""
    t_exp, q_exp, mu = m
    parts = []
    if q_exp:
        parts.append(_power("q", q_exp))
    if t_exp:
        parts.append(_power("t", t_exp))
    for (i, j, g), e in mu:
        parts.append(_power(f"u[{i + 1},{j + 1},{g}]", e))
    return " ".join(parts) if parts else "1"


class LaurentPoly:
    """Sparse integer combination of Gamma monomials.

    Instances are immutable values; every operation returns a new object.
    """

    __slots__ = ("_terms", "_hash", "_tlist")

    def __init__(self, terms: Mapping | None = None):
        clean: dict[int, int] = {}
        for m, c in (terms or {}).items():
            k = encode(m)
            clean[k] = clean.get(k, 0) + int(c)
        self._terms = {k: c for k, c in clean.items() if c}
        self._hash = None
        self._tlist = None

    @classmethod
    def _raw(cls, terms: dict[int, int]) -> LaurentPoly:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        obj._tlist = None
        return obj

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls._raw({})

    @classmethod
    def const(cls, c: int) -> LaurentPoly:
        return cls._raw({0: c} if c else {})

    @classmethod
    def monomial(cls, q: int = 0, t: int = 0, mu: Mapping[MuKey, int] | None = None,
                 coeff: int = 1) -> LaurentPoly:
        if not coeff:
            return cls.zero()
        return cls._raw({encode(make_monomial(q, t, mu)): coeff})

    @classmethod
    def from_monomial(cls, m, coeff: int = 1) -> LaurentPoly:
        return cls._raw({encode(m): coeff} if coeff else {})

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[GammaMonomial, int]:
        return {decode(k): c for k, c in self._terms.items()}

    def items(self) -> Iterator[tuple[GammaMonomial, int]]:
        """Terms in the deterministic global order."""
        decoded = sorted((decode(k), c) for k, c in self._terms.items())
        return iter(decoded)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, m) -> int:
        return self._terms.get(encode(m), 0)

    def t_valuation(self) -> float:
        return t_valuation(self)

    def t_degree(self) -> float:
        if not self._terms:
            return -math.inf
        return max(key_t(k) for k in self._terms)

    def t_coefficient(self, k: int) -> LaurentPoly:
        """The ``t^k`` coefficient as an element of Z[Gamma_0]."""
        return LaurentPoly._raw({key - k: c for key, c in self._terms.items() if key_t(key) == k})

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def _t_items(self) -> list[tuple[int, int, int]]:
        if self._tlist is None:
            self._tlist = [(key_t(k), k, c) for k, c in self._terms.items()]
        return self._tlist

    # -- ring operations ----------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = self._terms, other._terms
        if len(b) > len(a):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return LaurentPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> LaurentPoly:
        return (-self) + other

    def __mul__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            if not other:
                return LaurentPoly.zero()
            return LaurentPoly._raw({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials can be inverted")
            (k, c), = self._terms.items()
            if abs(c) != 1:
                raise ValueError("only unit monomials can be inverted")
            return LaurentPoly._raw({-k: c}) ** (-n)
        out = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def mul_monomial(self, m, coeff: int = 1) -> LaurentPoly:
        """Multiply by ``coeff * m`` where ``m`` is a ``(t, q, mu)`` triple."""
        if not coeff:
            return LaurentPoly.zero()
        s = encode(m)
        return LaurentPoly._raw({k + s: c * coeff for k, c in self._terms.items()})

    def truncate(self, n: int) -> LaurentPoly:
        """Drop every term with t-exponent above ``n``."""
        return LaurentPoly._raw({k: c for k, c in self._terms.items() if key_t(k) <= n})

    def map_monomials(self, fn) -> LaurentPoly:
        """Apply ``fn: GammaMonomial -> (t, q, mu)`` to every term, merging collisions."""
        out: dict[int, int] = {}
        for k, c in self._terms.items():
            nk = encode(fn(decode(k)))
            out[nk] = out.get(nk, 0) + c
        return LaurentPoly._raw({k: c for k, c in out.items() if c})

    def _map_keys(self, fn) -> LaurentPoly:
        out: dict[int, int] = {}
        for k, c in self._terms.items():
            nk = fn(k)
            out[nk] = out.get(nk, 0) + c
        return LaurentPoly._raw({k: c for k, c in out.items() if c})

    # -- display ------------------------------------------------------
    def __str__(self) -> str:
        return render_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({render_poly(self)!r})"


def render_poly(p: LaurentPoly) -> str:
    if not p:
        return "0"
    out = []
    for k, (m, c) in enumerate(p.items()):
        mono = render_monomial(m)
        mag = abs(c)
        if mono == "1":
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag} {mono}"
        if k == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out)


def poly_mul(a: LaurentPoly, b: LaurentPoly, trunc: int | None = None) -> LaurentPoly:
    """Exact product; with ``trunc`` the terms of t-degree above it are dropped."""
    if len(a._terms) < len(b._terms):
        a, b = b, a
    out: dict[int, int] = {}
    get = out.get
    if trunc is None:
        big = a._terms.items()
        for kb, cb in b._terms.items():
            for ka, ca in big:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    else:
        big = a._t_items()
        for tb, kb, cb in b._t_items():
            lim = trunc - tb
            for ta, ka, ca in big:
                if ta <= lim:
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
    return LaurentPoly._raw({k: c for k, c in out.items() if c})


def apply_phi(a: LaurentPoly) -> LaurentPoly:
    """The involution mu_ij -> mu_ji: negate every mass exponent."""
    def fn(k):
        low = _key_low(k)[2]
        return 2 * low - k
    return LaurentPoly._raw({fn(k): c for k, c in a._terms.items()})


def specialize(a: LaurentPoly, mu: bool = False, q: bool = False, t: bool = False) -> LaurentPoly:
    """Evaluate the selected generators at 1, summing collided coefficients."""
    def fn(k):
        tt, qq, low = _key_low(k)
        if mu:
            k = low
        if q:
            k -= qq << SLOT_BITS
        if t:
            k -= tt
        return k
    return a._map_keys(fn)


def q_integer(k: int, d: int = 1) -> LaurentPoly:
    """The quantum integer ``[k]`` evaluated at ``q^d``."""
    if k < 1 or d < 1:
        raise ValueError(f"q_integer needs k >= 1 and d >= 1, got k={k}, d={d}")
    return LaurentPoly({(0, d * (k - 1 - 2 * m), ()): 1 for m in range(k)})


def t_valuation(a: LaurentPoly) -> float:
    """Lowest t-exponent, or ``math.inf`` for zero."""
    if not a._terms:
        return math.inf
    return min(key_t(k) for k in a._terms)


class TruncatedSeries:
    """A Laurent series in t known exactly through ``t^trunc``."""

    __slots__ = ("poly", "trunc")

    def __init__(self, poly: LaurentPoly, trunc: int):
        self.poly = poly.truncate(trunc)
        self.trunc = trunc

    def _combine_trunc(self, other: TruncatedSeries) -> int:
        # each unknown tail meets the other factor's known part or its tail
        va, vb = t_valuation(self.poly), t_valuation(other.poly)
        return int(min(self.trunc + vb, other.trunc + va, self.trunc + other.trunc + 1))

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.poly + other.poly, min(self.trunc, other.trunc))
        if isinstance(other, (LaurentPoly, int)):
            return TruncatedSeries(self.poly + other, self.trunc)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.poly, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            n = self._combine_trunc(other)
            return TruncatedSeries(poly_mul(self.poly, other.poly, n), n)
        if isinstance(other, int):
            return TruncatedSeries(self.poly * other, self.trunc)
        if isinstance(other, LaurentPoly):
            v = t_valuation(other)
            if v == math.inf:
                return TruncatedSeries(LaurentPoly.zero(), self.trunc)
            n = self.trunc + int(v)
            return TruncatedSeries(poly_mul(self.poly, other, n), n)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.trunc, other.trunc)
        return self.poly.truncate(n) == other.poly.truncate(n)

    __hash__ = None

    def agrees_with(self, other, through: int | None = None) -> bool:
        """Equality of the t-expansions through ``t^through``."""
        n = self.trunc if through is None else through
        if n > self.trunc or (isinstance(other, TruncatedSeries) and n > other.trunc):
            raise ValueError(f"cannot compare through t^{n}: series only known to lower order")
        other_poly = other.poly if isinstance(other, TruncatedSeries) else other
        return self.poly.truncate(n) == other_poly.truncate(n)

    def t_valuation(self) -> float:
        return t_valuation(self.poly)

    def specialize(self, mu: bool = False, q: bool = False, t: bool = False) -> TruncatedSeries:
        if t:
            raise ValueError(
                "t-evaluation undefined on a truncated series; use the guarded "
                "regrading in qtcartan.ep.evaluate_t_at_one"
            )
        return TruncatedSeries(specialize(self.poly, mu=mu, q=q), self.trunc)

    def phi(self) -> TruncatedSeries:
        return TruncatedSeries(apply_phi(self.poly), self.trunc)

    def __str__(self) -> str:
        return f"{render_poly(self.poly)} + O(t^{self.trunc + 1})"

    def __repr__(self) -> str:
        return f"TruncatedSeries({render_poly(self.poly)!r}, trunc={self.trunc})"
