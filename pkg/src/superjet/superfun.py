"""Superfunctions on R^{p|q} and their evaluation at Lambda-points.

A superfunction is sigma = sum_J sigma_J(x) theta^J with polynomial
coefficients, stored as {J bitmask: Polynomial}.  theta monomials are kept in
ascending index order and all signs are absorbed into the coefficients; the
same convention fixes every other odd-monomial ordering in the package.

Evaluation at a point nu = (nu_even, nu_odd) over Lambda_n expands each
coefficient around the body and contracts the resulting truncated Taylor data
against the nilpotent parts:

    nu(sigma) = sum_{I,J} (1/I!) (D_I sigma_J)(body) * nu2^I * nu1^J

The iteration over I stops by itself once the nilpotent monomials vanish, so
there is no truncation knob.  `sf_eval_naive` is the independent brute-force
check: substitute the full coordinates into sigma_J and expand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionError, ParityError, SchemaError
from .grassmann import GrassmannElement, merge_sign
from .jetcalc import SuperTaylor, exp_pair
from .polyalg import (
    DEFAULT_DEGREE_BOUND,
    Polynomial,
    iter_multiindices_upto,
    mi_factorial,
    poly_compose,
    poly_derive,
    poly_eval,
)


class SuperFunction:
    """sum_J sigma_J(x) theta^J with zero components omitted."""

    __slots__ = ("p", "q", "components")

    def __init__(self, p: int, q: int, components=None):
        self.p = p
        self.q = q
        clean = {}
        for mask, poly in (components or {}).items():
            if mask < 0 or mask >> q:
                raise DimensionError(f"theta mask {mask:b} uses more than {q} odd coordinates")
            if poly.p != p:
                raise DimensionError("component polynomial has wrong variable count")
            if poly:
                clean[mask] = poly
        self.components = clean

    @classmethod
    def zero(cls, p: int, q: int) -> "SuperFunction":
        return cls(p, q, {})

    @classmethod
    def constant(cls, p: int, q: int, c) -> "SuperFunction":
        return cls(p, q, {0: Polynomial.constant(p, c)})

    @classmethod
    def one(cls, p: int, q: int) -> "SuperFunction":
        return cls.constant(p, q, Fraction(1))

    @classmethod
    def from_poly(cls, poly: Polynomial, q: int) -> "SuperFunction":
        return cls(poly.p, q, {0: poly})

    @classmethod
    def coordinate(cls, p: int, q: int, j: int) -> "SuperFunction":
        """The even coordinate x_j (0-based)."""
        return cls(p, q, {0: Polynomial.variable(p, j)})

    @classmethod
    def theta(cls, p: int, q: int, b: int) -> "SuperFunction":
        """The odd coordinate theta_b (0-based)."""
        if not 0 <= b < q:
            raise DimensionError(f"odd coordinate {b} outside 0..{q - 1}")
        return cls(p, q, {1 << b: Polynomial.one(p)})

    def _check(self, other: "SuperFunction"):
        if (self.p, self.q) != (other.p, other.q):
            raise DimensionError(
                f"superfunctions on R^({self.p}|{self.q}) and R^({other.p}|{other.q})"
            )

    def __add__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        self._check(other)
        comps = dict(self.components)
        for mask, poly in other.components.items():
            acc = comps.get(mask)
            acc = poly if acc is None else acc + poly
            if acc:
                comps[mask] = acc
            else:
                comps.pop(mask, None)
        return SuperFunction(self.p, self.q, comps)

    def __neg__(self):
        return SuperFunction(self.p, self.q, {m: -f for m, f in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SuperFunction):
            return self.scale(other)
        self._check(other)
        comps: dict = {}
        for ma, fa in self.components.items():
            for mb, fb in other.components.items():
                if ma & mb:
                    continue
                poly = fa * fb
                if merge_sign(ma, mb) < 0:
                    poly = -poly
                mask = ma | mb
                acc = comps.get(mask)
                acc = poly if acc is None else acc + poly
                if acc:
                    comps[mask] = acc
                else:
                    comps.pop(mask, None)
        return SuperFunction(self.p, self.q, comps)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "SuperFunction":
        return SuperFunction(self.p, self.q, {m: f * c for m, f in self.components.items()})

    def __eq__(self, other):
        if isinstance(other, SuperFunction):
            return (self.p, self.q) == (other.p, other.q) and self.components == other.components
        return NotImplemented

    def __bool__(self):
        return bool(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def parity(self):
        seen = {m.bit_count() & 1 for m in self.components}
        if len(seen) == 1:
            return seen.pop()
        return None if seen else 0

    def is_even(self) -> bool:
        return all(not (m.bit_count() & 1) for m in self.components)

    def is_odd(self) -> bool:
        return all(m.bit_count() & 1 for m in self.components)

    def body_poly(self) -> Polynomial:
        """The theta-free component."""
        return self.components.get(0, Polynomial.zero(self.p))

    def nilpotent_part(self) -> "SuperFunction":
        return SuperFunction(
            self.p, self.q, {m: f for m, f in self.components.items() if m != 0}
        )

    def theta_degree(self) -> int:
        if not self.components:
            return -1
        return max(m.bit_count() for m in self.components)

    def eval_body(self, x0) -> dict:
        """{mask: sigma_J(x0)} with zero values dropped."""
        out = {}
        for mask, poly in self.components.items():
            v = poly.eval_scalar(x0)
            if v:
                out[mask] = v
        return out

    def __str__(self):
        if not self.components:
            return "0"
        parts = []
        for mask in sorted(self.components, key=lambda m: (m.bit_count(), m)):
            poly = self.components[mask]
            thetas = " ".join(f"theta{b + 1}" for b in range(self.q) if mask >> b & 1)
            if mask == 0:
                parts.append(f"{poly}")
            else:
                parts.append(f"({poly}) {thetas}")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> dict:
        comps = []
        for mask in sorted(self.components):
            J = [mask >> b & 1 for b in range(self.q)]
            comps.append({"J": J, "poly": self.components[mask].to_json()})
        return {"p": self.p, "q": self.q, "components": comps}

    @classmethod
    def from_json(cls, data: dict) -> "SuperFunction":
        try:
            p = int(data["p"])
            q = int(data["q"])
            comps = {}
            for item in data["components"]:
                J = [int(v) for v in item["J"]]
                if len(J) != q or any(v not in (0, 1) for v in J):
                    raise SchemaError(f"bad odd multi-index {J}")
                mask = sum(1 << b for b, v in enumerate(J) if v)
                if mask in comps:
                    raise SchemaError("repeated odd multi-index")
                comps[mask] = Polynomial.from_json(item["poly"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"bad SuperFunction payload: {exc}") from exc
        return cls(p, q, comps)


def sf_mul(a: SuperFunction, b: SuperFunction) -> SuperFunction:
    return a * b


@dataclass
class SuperPoint:
    """A Lambda_n-point of R^{p|q}: p even and q odd Grassmann coordinates."""

    n: int
    even: list = field(default_factory=list)
    odd: list = field(default_factory=list)

    def __post_init__(self):
        for c in self.even:
            if c.n != self.n:
                raise DimensionError("even coordinate over wrong generator count")
            if not c.is_even():
                raise ParityError("even coordinate contains odd monomials")
        for c in self.odd:
            if c.n != self.n:
                raise DimensionError("odd coordinate over wrong generator count")
            if not c.is_odd():
                raise ParityError("odd coordinate contains even monomials")

    @property
    def p(self) -> int:
        return len(self.even)

    @property
    def q(self) -> int:
        return len(self.odd)

    def body(self) -> list:
        return [c.body() for c in self.even]

    def nilpotent_even(self) -> list:
        return [c.split()[1] for c in self.even]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "even": [c.to_json() for c in self.even],
            "odd": [c.to_json() for c in self.odd],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SuperPoint":
        try:
            n = int(data["n"])
            even = [GrassmannElement.from_json(d) for d in data["even"]]
            odd = [GrassmannElement.from_json(d) for d in data["odd"]]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(f"bad SuperPoint payload: {exc}") from exc
        for c in even + odd:
            if c.n != n:
                raise SchemaError("coordinate over wrong generator count")
        return cls(n, even, odd)


def sf_eval(sigma: SuperFunction, nu: SuperPoint) -> GrassmannElement:
    """Evaluate sigma at nu through the truncated Taylor pairing."""
    if (sigma.p, sigma.q) != (nu.p, nu.q):
        raise DimensionError(
            f"superfunction on R^({sigma.p}|{sigma.q}), point of R^({nu.p}|{nu.q})"
        )
    n = nu.n
    body = nu.body()
    nil = nu.nilpotent_even()

    # multi-indices whose nilpotent monomial survives; soul degree >= 2 caps |I|
    live = []
    powcache: list[dict[int, GrassmannElement]] = [dict() for _ in nil]

    def power(i, e):
        cache = powcache[i]
        got = cache.get(e)
        if got is None:
            got = GrassmannElement.one(n) if e == 0 else power(i, e - 1) * nil[i]
            cache[e] = got
        return got

    for I in iter_multiindices_upto(sigma.p, n // 2):
        mono = GrassmannElement.one(n)
        for i, e in enumerate(I):
            if e:
                mono = mono * power(i, e)
                if mono.is_zero():
                    break
        if not mono.is_zero():
            live.append(I)

    coeffs = {}
    for mask, poly in sigma.components.items():
        for I in live:
            val = poly_derive(poly, I).eval_scalar(body) / mi_factorial(I)
            if val:
                coeffs[(I, mask)] = (val,)
    data = SuperTaylor(p=sigma.p, q=sigma.q, mt=1, coeffs=coeffs)
    return exp_pair(data, nil, nu.odd, n)[0]


def sf_eval_naive(sigma: SuperFunction, nu: SuperPoint) -> GrassmannElement:
    """Substitute-and-expand evaluation; the oracle sf_eval must agree with."""
    if (sigma.p, sigma.q) != (nu.p, nu.q):
        raise DimensionError("dimension mismatch")
    n = nu.n
    out = GrassmannElement.zero(n)
    for mask, poly in sigma.components.items():
        term = poly_eval(poly, nu.even)
        m = mask
        while m:
            low = m & -m
            term = term * nu.odd[low.bit_length() - 1]
            m ^= low
        out = out + term
    return out


def sf_substitute(sigma: SuperFunction, phi,
                  degree_bound=DEFAULT_DEGREE_BOUND) -> SuperFunction:
    """Pullback of sigma along the morphism phi (sigma on phi's target).

    Even coordinate pullbacks split into a theta-free body polynomial and a
    nilpotent remainder; sigma_J is Taylor-expanded in the remainder, which
    terminates because the theta-degree is bounded.  Odd coordinate monomials are
    substituted by the odd pullbacks in ascending order.  `degree_bound` is the
    poly_compose guardrail; None disables it.
    """
    p2, q2 = phi.target
    if (sigma.p, sigma.q) != (p2, q2):
        raise DimensionError(
            f"superfunction on R^({sigma.p}|{sigma.q}) cannot pull back along a "
            f"morphism into R^({p2}|{q2})"
        )
    p, q = phi.source
    for sf in phi.even_pb:
        if not sf.is_even():
            raise ParityError("even pullback is not even")
    for sf in phi.odd_pb:
        if not sf.is_odd():
            raise ParityError("odd pullback is not odd")
    kwargs = {"degree_bound": degree_bound}

    bodies = [sf.body_poly() for sf in phi.even_pb]
    nils = [sf.nilpotent_part() for sf in phi.even_pb]

    powcache: list[dict[int, SuperFunction]] = [dict() for _ in nils]

    def power(i, e):
        cache = powcache[i]
        got = cache.get(e)
        if got is None:
            got = SuperFunction.one(p, q) if e == 0 else power(i, e - 1) * nils[i]
            cache[e] = got
        return got

    odd_cache: dict[int, SuperFunction] = {0: SuperFunction.one(p, q)}

    def odd_monomial(mask):
        got = odd_cache.get(mask)
        if got is None:
            low = mask & -mask
            got = phi.odd_pb[low.bit_length() - 1] * odd_monomial(mask ^ low)
            odd_cache[mask] = got
        return got

    out = SuperFunction.zero(p, q)
    for mask, poly in sigma.components.items():
        wedge = odd_monomial(mask)
        if wedge.is_zero():
            continue
        for I in iter_multiindices_upto(p2, q // 2):
            mono = SuperFunction.one(p, q)
            for i, e in enumerate(I):
                if e:
                    mono = mono * power(i, e)
                    if mono.is_zero():
                        break
            if mono.is_zero():
                continue
            coeff = poly_compose(poly_derive(poly, I), bodies, **kwargs) / mi_factorial(I)
            if not coeff:
                continue
            out = out + SuperFunction.from_poly(coeff, q) * mono * wedge
    return out
