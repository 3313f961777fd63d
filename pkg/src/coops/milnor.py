"""The odd-primary dual Steenrod algebra A_* = P(xi_1, xi_2, ...) (x) E(tau_0, tau_1, ...).

Elements live in one of two generator systems: the conjugate one
(zeta_k = chi xi_k, taubar_k = chi tau_k, written ``z``/``t``) or the plain one
(xi_k, tau_k, written ``xi``/``tau``).  A monomial stores its polynomial
exponents (index k >= 1) and its sorted set of exterior indices (k >= 0);
exterior factors are always kept in increasing index order.

Signs follow the Koszul convention everywhere, including
(a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd in tensor powers.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .errors import UsageError
from .fp_linalg import check_prime


@dataclass(frozen=True)
class Monomial:
    zeta: Tuple[int, ...] = ()   # zeta[k-1] = exponent of zeta_k (or xi_k)
    tau: Tuple[int, ...] = ()    # sorted exterior indices
    conj: bool = True

    def __post_init__(self):
        z = tuple(self.zeta)
        while z and z[-1] == 0:
            z = z[:-1]
        if any(e < 0 for e in z):
            raise UsageError("negative exponent")
        t = tuple(self.tau)
        if list(t) != sorted(set(t)) or any(i < 0 for i in t):
            raise UsageError(f"exterior indices must be distinct, sorted, >= 0: {t}")
        object.__setattr__(self, "zeta", z)
        object.__setattr__(self, "tau", t)

    def exponent(self, k: int) -> int:
        return self.zeta[k - 1] if 0 < k <= len(self.zeta) else 0

    def degree(self, p: int) -> int:
        d = sum(e * 2 * (p ** k - 1) for k, e in enumerate(self.zeta, start=1))
        return d + sum(2 * p ** k - 1 for k in self.tau)

    def weight(self, p: int) -> int:
        w = sum(e * p ** k for k, e in enumerate(self.zeta, start=1))
        return w + sum(p ** k for k in self.tau)

    @property
    def length(self) -> int:
        return len(self.tau)

    @property
    def is_odd(self) -> bool:
        return len(self.tau) % 2 == 1

    def is_unit(self) -> bool:
        return not self.zeta and not self.tau

    def __str__(self):
        return format_monomial(self)


ONE = Monomial()
ONE_PLAIN = Monomial(conj=False)


def unit_monomial(conj: bool = True) -> Monomial:
    return ONE if conj else ONE_PLAIN


def sort_key(m: Monomial, p: int):
    """Global monomial order: degree, then zeta exponents, then exterior set."""
    return (m.degree(p), m.zeta, m.tau)


def format_monomial(m: Monomial) -> str:
    zname, tname = ("z", "t") if m.conj else ("xi", "tau")
    parts = []
    for k, e in enumerate(m.zeta, start=1):
        if e == 1:
            parts.append(f"{zname}{k}")
        elif e > 1:
            parts.append(f"{zname}{k}^{e}")
    parts.extend(f"{tname}{k}" for k in m.tau)
    return " ".join(parts) if parts else "1"


_TOKEN = re.compile(r"^(z|t|xi|tau)(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str) -> Tuple[int, Monomial]:
    """Parse ``z1^9 z3 t2`` (or ``xi1 tau0``); returns (sign, monomial).

    The sign records the reordering of exterior factors into increasing
    order; a repeated exterior factor gives sign 0.
    """
    text = text.strip()
    if text in ("", "1"):
        return 1, ONE
    zeta: Dict[int, int] = {}
    taus: List[int] = []
    system = None
    for tok in text.split():
        mt = _TOKEN.match(tok)
        if not mt:
            raise UsageError(f"bad monomial token {tok!r}")
        name, idx, exp = mt.group(1), int(mt.group(2)), int(mt.group(3) or 1)
        conj = name in ("z", "t")
        if system is None:
            system = conj
        elif system != conj:
            raise UsageError(f"mixed generator systems in {text!r}")
        if name in ("z", "xi"):
            if idx < 1:
                raise UsageError(f"polynomial generators start at index 1: {tok}")
            zeta[idx] = zeta.get(idx, 0) + exp
        else:
            if exp != 1:
                return 0, unit_monomial(conj)
            taus.append(idx)
    if len(set(taus)) != len(taus):
        return 0, unit_monomial(system)
    sign = _perm_sign(taus)
    top = max(zeta) if zeta else 0
    z = tuple(zeta.get(k, 0) for k in range(1, top + 1))
    return sign, Monomial(z, tuple(sorted(taus)), system)


def _perm_sign(seq: List[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def mono_mul(a: Monomial, b: Monomial) -> Tuple[int, Optional[Monomial]]:
    """Product of monomials as (sign, monomial); (0, None) when it vanishes."""
    if a.conj != b.conj:
        raise UsageError("cannot multiply elements of different generator systems")
    if a.tau and b.tau:
        sb = set(b.tau)
        if sb.intersection(a.tau):
            return 0, None
        # moving each b-index left past the larger a-indices
        inv = sum(1 for x in a.tau for y in b.tau if x > y)
        sign = -1 if inv % 2 else 1
        tau = tuple(sorted(a.tau + b.tau))
    else:
        sign, tau = 1, a.tau or b.tau
    za, zb = a.zeta, b.zeta
    if len(za) < len(zb):
        za, zb = zb, za
    zeta = tuple(x + (zb[i] if i < len(zb) else 0) for i, x in enumerate(za))
    return sign, Monomial(zeta, tau, a.conj)


class Element:
    """An F_p-linear combination of monomials of a single generator system."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        clean = {}
        conj = None
        for m, c in (terms or {}).items():
            c %= p
            if c:
                if conj is None:
                    conj = m.conj
                elif conj != m.conj:
                    raise UsageError("mixed generator systems in one element")
                clean[m] = c
        self.terms = clean

    # constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, p: int, m: Monomial, coeff: int = 1) -> "Element":
        return cls(p, {m: coeff})

    @classmethod
    def one(cls, p: int, conj: bool = True) -> "Element":
        return cls(p, {unit_monomial(conj): 1})

    @classmethod
    def parse(cls, p: int, text: str) -> "Element":
        """Parse ``2 z1^3 t2 + z2`` style text (``-`` also accepted)."""
        out: Dict[Monomial, int] = {}
        text = text.strip()
        if text in ("", "0"):
            return cls(p)
        chunks = re.split(r"\s*([+-])\s*", text)
        sign = 1
        if chunks[0] == "":
            chunks = chunks[1:]
        else:
            chunks = ["+"] + chunks
        for op, body in zip(chunks[::2], chunks[1::2]):
            sign = 1 if op == "+" else -1
            words = body.split()
            coeff = 1
            if words and words[0].isdigit():
                coeff = int(words[0])
                words = words[1:]
            s, m = parse_monomial(" ".join(words))
            if s:
                out[m] = out.get(m, 0) + sign * s * coeff
        return cls(p, out)

    # structure ----------------------------------------------------------
    @property
    def conj(self) -> Optional[bool]:
        for m in self.terms:
            return m.conj
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: Monomial) -> int:
        return self.terms.get(m, 0)

    def degrees(self) -> set:
        return {m.degree(self.p) for m in self.terms}

    def _check(self, other: "Element"):
        if self.p != other.p:
            raise UsageError("elements over different primes")
        a, b = self.conj, other.conj
        if a is not None and b is not None and a != b:
            raise UsageError("cannot combine elements of different generator systems")

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Element(self.p, out)

    def __neg__(self):
        return Element(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "Element":
        return Element(self.p, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, Element):
            return NotImplemented
        self._check(other)
        out: Dict[Monomial, int] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                s, m = mono_mul(a, b)
                if s:
                    out[m] = out.get(m, 0) + s * ca * cb
        return Element(self.p, out)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int) -> "Element":
        result = Element.one(self.p, self.conj if self.conj is not None else True)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: sort_key(mc[0], self.p))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            body = format_monomial(m)
            if c == 1:
                parts.append(body)
            elif body == "1":
                parts.append(str(c))
            else:
                parts.append(f"{c} {body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Element(p={self.p}, {self})"


# generators ---------------------------------------------------------------

def zeta(p: int, k: int, e: int = 1) -> Element:
    if k == 0:
        return Element.one(p)
    return Element.monomial(p, Monomial((0,) * (k - 1) + (e,)))


def taubar(p: int, k: int) -> Element:
    return Element.monomial(p, Monomial((), (k,)))


def xi(p: int, k: int, e: int = 1) -> Element:
    if k == 0:
        return Element.one(p, conj=False)
    return Element.monomial(p, Monomial((0,) * (k - 1) + (e,), (), conj=False))


def tau(p: int, k: int) -> Element:
    return Element.monomial(p, Monomial((), (k,), conj=False))


# tensors --------------------------------------------------------------------

class Tensor:
    """Element of a tensor power of A_*; keys are tuples of monomials."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        self.terms = {k: c % p for k, c in (terms or {}).items() if c % p}

    @classmethod
    def pure(cls, p: int, *factors: Monomial) -> "Tensor":
        return cls(p, {tuple(factors): 1})

    @classmethod
    def from_elements(cls, *elements: Element) -> "Tensor":
        p = elements[0].p
        out = Tensor(p, {(): 1})
        for el in elements:
            nxt = {}
            for key, c in out.terms.items():
                for m, d in el.terms.items():
                    nxt[key + (m,)] = nxt.get(key + (m,), 0) + c * d
            out = Tensor(p, nxt)
        return out

    def __add__(self, other: "Tensor") -> "Tensor":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Tensor(self.p, out)

    def __neg__(self):
        return Tensor(self.p, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "Tensor") -> "Tensor":
        out: Dict[tuple, int] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                sign = 1
                # Koszul: b_j moves past a_i for i > j
                odd_a = [m.is_odd for m in a]
                parity = 0
                for j, bj in enumerate(b):
                    if bj.is_odd:
                        parity += sum(odd_a[j + 1:])
                if parity % 2:
                    sign = -1
                key = []
                for x, y in zip(a, b):
                    s, m = mono_mul(x, y)
                    if not s:
                        break
                    sign *= s
                    key.append(m)
                else:
                    key = tuple(key)
                    out[key] = out.get(key, 0) + sign * ca * cb
        return Tensor(self.p, out)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in sorted(self.terms.items(),
                             key=lambda kc: tuple(sort_key(m, self.p) for m in kc[0])):
            body = " (x) ".join(format_monomial(m) for m in key)
            parts.append(body if c == 1 else f"{c} [{body}]")
        return " + ".join(parts)

    __repr__ = __str__


# coproduct ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _coproduct_generator(p: int, kind: str, k: int, conj: bool) -> Tensor:
    if kind == "zeta":
        terms = {}
        for i in range(k + 1):
            j = k - i
            if conj:
                # psi(zeta_k) = sum_{i+j=k} zeta_j (x) zeta_i^{p^j}
                left, right = zeta(p, j), zeta(p, i, p ** j) if i else Element.one(p)
            else:
                # psi(xi_k) = sum_{i+j=k} xi_i^{p^j} (x) xi_j
                left = xi(p, i, p ** j) if i else Element.one(p, False)
                right = xi(p, j)
            t = Tensor.from_elements(left, right)
            for key, c in t.terms.items():
                terms[key] = terms.get(key, 0) + c
        return Tensor(p, terms)
    # exterior generator
    if conj:
        # psi(taubar_k) = 1 (x) taubar_k + sum_{i+j=k} taubar_j (x) zeta_i^{p^j}
        out = Tensor.from_elements(Element.one(p), taubar(p, k))
        for i in range(k + 1):
            j = k - i
            right = zeta(p, i, p ** j) if i else Element.one(p)
            out = out + Tensor.from_elements(taubar(p, j), right)
    else:
        # psi(tau_k) = tau_k (x) 1 + sum_{i+j=k} xi_i^{p^j} (x) tau_j
        out = Tensor.from_elements(tau(p, k), Element.one(p, False))
        for i in range(k + 1):
            j = k - i
            left = xi(p, i, p ** j) if i else Element.one(p, False)
            out = out + Tensor.from_elements(left, tau(p, j))
    return out


@lru_cache(maxsize=None)
def _coproduct_power(p: int, k: int, e: int, conj: bool) -> Tensor:
    if e == 0:
        one = unit_monomial(conj)
        return Tensor.pure(p, one, one)
    if e == 1:
        return _coproduct_generator(p, "zeta", k, conj)
    half = _coproduct_power(p, k, e // 2, conj)
    sq = half * half
    return sq * _coproduct_generator(p, "zeta", k, conj) if e % 2 else sq


@lru_cache(maxsize=200000)
def coproduct_monomial(p: int, m: Monomial) -> Tensor:
    one = unit_monomial(m.conj)
    out = Tensor.pure(p, one, one)
    for k, e in enumerate(m.zeta, start=1):
        if e:
            out = out * _coproduct_power(p, k, e, m.conj)
    for k in m.tau:
        out = out * _coproduct_generator(p, "tau", k, m.conj)
    return out


def coproduct(x: Element) -> Tensor:
    """psi(x), extended multiplicatively (Koszul signs) and linearly."""
    out = Tensor(x.p)
    for m, c in x.terms.items():
        t = coproduct_monomial(x.p, m)
        out = out + Tensor(x.p, {k: c * v for k, v in t.terms.items()})
    return out


def counit(m: Monomial) -> int:
    return 1 if m.is_unit() else 0


def apply_in_slot(t: Tensor, slot: int, fn) -> Tensor:
    """Apply a degree-0 linear map (monomial -> Tensor or Element) in one slot.

    ``fn`` returns a Tensor (splitting the slot) or an Element.  Degree-0
    maps commute with the other factors without sign.
    """
    out: Dict[tuple, int] = {}
    for key, c in t.terms.items():
        img = fn(key[slot])
        if isinstance(img, Element):
            img_terms = {(m,): v for m, v in img.terms.items()}
        else:
            img_terms = img.terms
        for sub, v in img_terms.items():
            nk = key[:slot] + sub + key[slot + 1:]
            out[nk] = out.get(nk, 0) + c * v
    return Tensor(t.p, out)


def counit_in_slot(t: Tensor, slot: int) -> Tensor:
    out: Dict[tuple, int] = {}
    for key, c in t.terms.items():
        if key[slot].is_unit():
            nk = key[:slot] + key[slot + 1:]
            out[nk] = out.get(nk, 0) + c
    return Tensor(t.p, out)


# conjugation ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _plain_gen_in_conj(p: int, kind: str, n: int) -> Element:
    """xi_n or tau_n written in the conjugate generators."""
    if kind == "xi":
        if n == 0:
            return Element.one(p)
        # sum_{i+j=n} zeta_j^{p^i} xi_i = 0  (chi applied to the xi recursion)
        acc = Element(p)
        for i in range(n):
            acc = acc + zeta(p, n - i, p ** i) * _plain_gen_in_conj(p, "xi", i)
        return -acc
    # taubar_n + sum_{i+j=n} zeta_j^{p^i} tau_i = 0
    acc = taubar(p, n)
    for i in range(n):
        acc = acc + zeta(p, n - i, p ** i) * _plain_gen_in_conj(p, "tau", i)
    return -acc


@lru_cache(maxsize=None)
def _conj_gen_in_plain(p: int, kind: str, n: int) -> Element:
    """zeta_n or taubar_n written in the plain generators."""
    if kind == "zeta":
        if n == 0:
            return Element.one(p, False)
        # sum_{i+j=n} xi_j^{p^i} zeta_i = 0
        acc = Element(p)
        for i in range(n):
            acc = acc + xi(p, n - i, p ** i) * _conj_gen_in_plain(p, "zeta", i)
        return -acc
    # tau_n + sum_{i+j=n} xi_j^{p^i} taubar_i = 0
    acc = tau(p, n)
    for i in range(n):
        acc = acc + xi(p, n - i, p ** i) * _conj_gen_in_plain(p, "taubar", i)
    return -acc


def _substitute(x: Element, poly_gen, ext_gen, target_conj: bool) -> Element:
    out = Element(x.p)
    for m, c in x.terms.items():
        acc = Element.one(x.p, target_conj)
        for k, e in enumerate(m.zeta, start=1):
            if e:
                acc = acc * (poly_gen(k) ** e)
        for k in m.tau:
            acc = acc * ext_gen(k)
        out = out + acc.scale(c)
    return out


def to_conjugate(x: Element) -> Element:
    """Rewrite an element in the zeta/taubar generators."""
    if x.conj is None or x.conj:
        return x
    p = x.p
    return _substitute(x, lambda k: _plain_gen_in_conj(p, "xi", k),
                       lambda k: _plain_gen_in_conj(p, "tau", k), True)


def to_plain(x: Element) -> Element:
    """Rewrite an element in the xi/tau generators."""
    if x.conj is None or not x.conj:
        return x
    p = x.p
    return _substitute(x, lambda k: _conj_gen_in_plain(p, "zeta", k),
                       lambda k: _conj_gen_in_plain(p, "taubar", k), False)


def flip_system(x: Element) -> Element:
    """Relabel zeta <-> xi and taubar <-> tau without rewriting."""
    return Element(x.p, {Monomial(m.zeta, m.tau, not m.conj): c for m, c in x.terms.items()})


def conjugation(x: Element) -> Element:
    """chi(x), returned in the generator system of ``x``.

    chi is an algebra anti-automorphism; on a graded-commutative algebra the
    reversal sign cancels the reordering sign, so chi is multiplicative on
    monomials.  chi(xi_k) = zeta_k and chi(tau_k) = taubar_k by definition.
    """
    if x.conj is None:
        return x
    y = flip_system(x)
    return to_plain(y) if x.conj is False else to_conjugate(y)


# algebra flavors and bases ----------------------------------------------------

FLAVORS = ("full", "P", "E", "E(n)", "A//E(n)")


@dataclass(frozen=True)
class AlgebraSpec:
    p: int
    flavor: str = "full"
    n: Optional[int] = None

    def __post_init__(self):
        check_prime(self.p)
        if self.flavor not in FLAVORS:
            raise UsageError(f"unknown flavor {self.flavor!r}")
        if self.flavor in ("E(n)", "A//E(n)") and (self.n is None or self.n < 0):
            raise UsageError(f"flavor {self.flavor} needs n >= 0")

    @property
    def q(self) -> int:
        return 2 * (self.p - 1)

    def polynomial_allowed(self) -> bool:
        return self.flavor in ("full", "P", "A//E(n)")

    def exterior_allowed(self, k: int) -> bool:
        if self.flavor in ("full", "E"):
            return True
        if self.flavor == "E(n)":
            return k <= self.n
        if self.flavor == "A//E(n)":
            return k >= self.n + 1
        return False


def enumerate_monomials(p: int, *, max_degree: Optional[int] = None,
                        max_weight: Optional[int] = None,
                        poly: Iterable[int] = (), ext: Iterable[int] = (),
                        conj: bool = True) -> List[Monomial]:
    """All monomials in the given generators bounded by degree and/or weight."""
    if max_degree is None and max_weight is None:
        raise UsageError("enumeration needs a degree or weight bound")
    gens = []
    for k in poly:
        gens.append(("z", k, 2 * (p ** k - 1), p ** k))
    for k in ext:
        gens.append(("t", k, 2 * p ** k - 1, p ** k))

    def fits(d, w):
        return (max_degree is None or d <= max_degree) and (max_weight is None or w <= max_weight)

    gens = [g for g in gens if fits(g[2], g[3])]
    out = []

    def rec(i, d, w, zeta_exp, taus):
        if i == len(gens):
            top = max(zeta_exp) if zeta_exp else 0
            z = tuple(zeta_exp.get(k, 0) for k in range(1, top + 1))
            out.append(Monomial(z, tuple(sorted(taus)), conj))
            return
        kind, k, gd, gw = gens[i]
        if kind == "t":
            rec(i + 1, d, w, zeta_exp, taus)
            if fits(d + gd, w + gw):
                rec(i + 1, d + gd, w + gw, zeta_exp, taus + [k])
            return
        e = 0
        while fits(d + e * gd, w + e * gw):
            if e:
                zeta_exp[k] = e
            rec(i + 1, d + e * gd, w + e * gw, zeta_exp, taus)
            e += 1
        zeta_exp.pop(k, None)

    rec(0, 0, 0, {}, [])
    out.sort(key=lambda m: sort_key(m, p))
    return out


def generator_indices(spec: AlgebraSpec, max_degree: int):
    p = spec.p
    poly, ext = [], []
    if spec.polynomial_allowed():
        k = 1
        while 2 * (p ** k - 1) <= max_degree:
            poly.append(k)
            k += 1
    k = 0
    while 2 * p ** k - 1 <= max_degree:
        if spec.flavor != "P" and spec.exterior_allowed(k):
            ext.append(k)
        k += 1
    return poly, ext


def basis_up_to(spec: AlgebraSpec, t_max: int) -> List[Monomial]:
    poly, ext = generator_indices(spec, t_max)
    return enumerate_monomials(spec.p, max_degree=t_max, poly=poly, ext=ext)


def basis_of_degree(spec: AlgebraSpec, t: int) -> List[Monomial]:
    """All basis monomials of exact degree ``t`` for the chosen flavor."""
    if t < 0:
        raise UsageError("degree must be >= 0")
    return [m for m in basis_up_to(spec, t) if m.degree(spec.p) == t]


# packed fast path -------------------------------------------------------------
# A monomial packs into one int: exterior bitmask in the low TAU_BITS bits,
# then EXP_BITS per polynomial exponent.  Used by the exhaustive Hopf checks,
# where dictionaries keyed by small ints are several times faster.

TAU_BITS = 16
EXP_BITS = 12


def pack(m: Monomial) -> int:
    key = 0
    for k in m.tau:
        key |= 1 << k
    for k, e in enumerate(m.zeta):
        if e >= 1 << EXP_BITS:
            raise UsageError("exponent too large for the packed kernel")
        key |= e << (TAU_BITS + EXP_BITS * k)
    return key


def unpack(key: int, conj: bool = True) -> Monomial:
    mask = key & ((1 << TAU_BITS) - 1)
    tau = tuple(k for k in range(TAU_BITS) if mask >> k & 1)
    rest = key >> TAU_BITS
    zeta = []
    while rest:
        zeta.append(rest & ((1 << EXP_BITS) - 1))
        rest >>= EXP_BITS
    return Monomial(tuple(zeta), tau, conj)


_MASK = (1 << TAU_BITS) - 1


@lru_cache(maxsize=None)
def _mask_sign(a: int, b: int) -> int:
    """Sign of tau_A * tau_B -> tau_{A u B}; 0 if they overlap."""
    if a & b:
        return 0
    inv = 0
    while b:
        low = b & -b
        inv += bin(a & ~((low << 1) - 1)).count("1")
        b ^= low
    return -1 if inv % 2 else 1


def _parity(key: int) -> int:
    return bin(key & _MASK).count("1") & 1


def packed_mul(p: int, x: dict, y: dict) -> dict:
    """Koszul-signed product of packed tensors {(k_1, ..., k_r): coeff}."""
    out: dict = {}
    for a, ca in x.items():
        pa = [_parity(k) for k in a]
        for b, cb in y.items():
            sign = 1
            key = []
            par = 0
            for j, (ka, kb) in enumerate(zip(a, b)):
                s = _mask_sign(ka & _MASK, kb & _MASK)
                if not s:
                    break
                sign *= s
                if kb & _MASK and _parity(kb):
                    par += sum(pa[j + 1:])
                key.append(ka + kb)
            else:
                if par & 1:
                    sign = -sign
                key = tuple(key)
                c = (out.get(key, 0) + sign * ca * cb) % p
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
    return out


def packed_coproduct(p: int, m: Monomial, cache: Optional[dict] = None) -> dict:
    """psi(m) as {(left, right): coeff}, optionally memoized in ``cache``."""
    key = pack(m)
    if cache is not None and key in cache:
        return cache[key]
    if m.is_unit():
        res = {(0, 0): 1}
    else:
        # peel off one generator and recurse
        if m.tau:
            k = m.tau[-1]
            rest = Monomial(m.zeta, m.tau[:-1], m.conj)
            gen = _coproduct_generator(p, "tau", k, m.conj)
            left, right = packed_coproduct(p, rest, cache), _pack_tensor(gen)
        else:
            k = len(m.zeta)
            z = list(m.zeta)
            z[-1] -= 1
            rest = Monomial(tuple(z), (), m.conj)
            gen = _coproduct_generator(p, "zeta", k, m.conj)
            left, right = packed_coproduct(p, rest, cache), _pack_tensor(gen)
        res = packed_mul(p, left, right)
    if cache is not None:
        cache[key] = res
    return res


def _pack_tensor(t: Tensor) -> dict:
    return {tuple(pack(m) for m in key): c for key, c in t.terms.items()}


def coassociativity_holds(p: int, m: Monomial, cache: Optional[dict] = None) -> bool:
    """Compare (psi (x) 1)psi(m) with (1 (x) psi)psi(m) term by term."""
    if cache is None:
        cache = {}
    psi = packed_coproduct(p, m, cache)
    left: dict = {}
    right: dict = {}
    for (a, b), c in psi.items():
        for (a1, a2), d in packed_coproduct(p, unpack(a, m.conj), cache).items():
            k = (a1, a2, b)
            left[k] = (left.get(k, 0) + c * d) % p
        for (b1, b2), d in packed_coproduct(p, unpack(b, m.conj), cache).items():
            k = (a, b1, b2)
            right[k] = (right.get(k, 0) + c * d) % p
    left = {k: v for k, v in left.items() if v}
    right = {k: v for k, v in right.items() if v}
    return left == right


def counit_holds(p: int, m: Monomial, cache: Optional[dict] = None) -> bool:
    psi = packed_coproduct(p, m, cache)
    target = pack(m)
    lhs = {b: c for (a, b), c in psi.items() if a == 0}
    rhs = {a: c for (a, b), c in psi.items() if b == 0}
    return lhs == {target: 1} and rhs == {target: 1}
