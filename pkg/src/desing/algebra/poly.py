"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Mapping

Monomial = tuple[int, ...]
OrderKey = Callable[[Monomial], tuple]


@dataclass(frozen=True)
class VarContext:
    """Ordered variable names of an affine coordinate ring over Q."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("a variable context needs at least one variable")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def extend(self, *names: str) -> VarContext:
        return VarContext(self.names + tuple(names))

    def fresh_name(self, base: str = "t") -> str:
        if base not in self.names:
            return base
        k = 1
        while f"{base}{k}" in self.names:
            k += 1
        return f"{base}{k}"


# ---------------------------------------------------------------------------
# monomial orders: each maps an exponent tuple to a key, larger key = larger

def degrevlex(m: Monomial) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


def lex(m: Monomial) -> tuple:
    return m


def elimination(block: Iterable[int]) -> OrderKey:
    """Block order: monomials involving ``block`` dominate, ties by degrevlex."""
    block = tuple(block)

    def key(m: Monomial) -> tuple:
        return (sum(m[i] for i in block), degrevlex(m))

    return key


ORDERS: dict[str, OrderKey] = {"degrevlex": degrevlex, "lex": lex}


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_gcd(a: Monomial, b: Monomial) -> Monomial:
    return tuple(min(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------


class Poly:
    """A polynomial in ``ctx``; ``terms`` maps exponent tuples to nonzero rationals.

    Instances are treated as immutable.
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: VarContext, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.ctx = ctx
        clean: dict[Monomial, Fraction] = {}
        if terms:
            n = len(ctx)
            for m, c in terms.items():
                if c:
                    if len(m) != n:
                        raise ValueError(f"exponent {m} does not match context {ctx.names}")
                    clean[m] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx: VarContext, terms: dict[Monomial, Fraction]) -> Poly:
        p = cls.__new__(cls)
        p.ctx = ctx
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, ctx: VarContext, c) -> Poly:
        return cls._raw(ctx, {(0,) * len(ctx): Fraction(c)} if c else {})

    @classmethod
    def var(cls, ctx: VarContext, name: str) -> Poly:
        m = [0] * len(ctx)
        m[ctx.index(name)] = 1
        return cls._raw(ctx, {tuple(m): Fraction(1)})

    @classmethod
    def monomial(cls, ctx: VarContext, exps: Monomial, c=1) -> Poly:
        return cls._raw(ctx, {tuple(exps): Fraction(c)} if c else {})

    # -- basic predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.ctx), Fraction(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def min_degree(self) -> int | float:
        """Lowest total degree of a term; the order at the origin."""
        if not self.terms:
            return float("inf")
        return min(sum(m) for m in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.ctx.index(name)
        return max((m[i] for m in self.terms), default=-1)

    def variables(self) -> set[str]:
        used = set()
        for m in self.terms:
            used.update(self.ctx.names[i] for i, e in enumerate(m) if e)
        return used

    # -- ordering ------------------------------------------------------------
    def leading_monomial(self, order: OrderKey = degrevlex) -> Monomial:
        return max(self.terms, key=order)

    def leading_coefficient(self, order: OrderKey = degrevlex) -> Fraction:
        return self.terms[self.leading_monomial(order)]

    def sorted_terms(self, order: OrderKey = degrevlex) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: order(t[0]), reverse=True)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: Poly):
        if self.ctx != other.ctx:
            raise ValueError(f"context mismatch: {self.ctx.names} vs {other.ctx.names}")

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.ctx, other)
        return NotImplemented

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._raw(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw(self.ctx, {})
            return Poly._raw(self.ctx, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly._raw(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, mono: Monomial, c) -> Poly:
        return Poly._raw(
            self.ctx,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    def monic(self, order: OrderKey = degrevlex) -> Poly:
        if not self.terms:
            return self
        return self * (1 / self.leading_coefficient(order))

    def primitive(self, order: OrderKey = degrevlex) -> Poly:
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        den = lcm(*(c.denominator for c in self.terms.values()))
        nums = [int(c * den) for c in self.terms.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        scale = Fraction(den, g)
        if self.leading_coefficient(order) < 0:
            scale = -scale
        return self * scale

    # -- calculus and substitution -------------------------------------------
    def diff(self, name: str) -> Poly:
        i = self.ctx.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * m[i]
        return Poly._raw(self.ctx, out)

    def evaluate(self, point: Mapping[str, Fraction | int]) -> Fraction:
        vals = [Fraction(point[n]) for n in self.ctx.names]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in zip(vals, m):
                if e:
                    t *= v**e
            total += t
        return total

    def subs(self, images: Mapping[str, Poly], target: VarContext | None = None) -> Poly:
        """Substitute each variable by a polynomial of ``target``.

        Variables absent from ``images`` must exist in ``target`` and map to themselves.
        """
        if target is None:
            target = next(iter(images.values())).ctx if images else self.ctx
        imgs = []
        for n in self.ctx.names:
            if n in images:
                q = images[n]
                if q.ctx != target:
                    raise ValueError("substitution images must share the target context")
                imgs.append(q)
            else:
                imgs.append(Poly.var(target, n))
        powers: list[dict[int, Poly]] = [{} for _ in imgs]

        def power(i: int, e: int) -> Poly:
            cache = powers[i]
            if e not in cache:
                cache[e] = imgs[i] ** e
            return cache[e]

        result: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            term = Poly.const(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            for mm, v in term.terms.items():
                s = result.get(mm, 0) + v
                if s:
                    result[mm] = s
                else:
                    result.pop(mm, None)
        return Poly._raw(target, result)

    def to_context(self, target: VarContext) -> Poly:
        """Re-embed into a context containing all variables this polynomial uses."""
        if target == self.ctx:
            return self
        idx = []
        for n in self.ctx.names:
            idx.append(target.names.index(n) if n in target.names else None)
        out = {}
        for m, c in self.terms.items():
            mm = [0] * len(target)
            for i, e in enumerate(m):
                if e:
                    if idx[i] is None:
                        raise ValueError(f"variable {self.ctx.names[i]} missing from target context")
                    mm[idx[i]] = e
            out[tuple(mm)] = c
        return Poly._raw(target, out)

    def coefficients_in(self, name: str) -> dict[int, Poly]:
        """Expansion sum_i c_i * name^i with c_i free of ``name``."""
        i = self.ctx.index(name)
        out: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            mm = list(m)
            k = mm[i]
            mm[i] = 0
            out.setdefault(k, {})[tuple(mm)] = c
        return {k: Poly._raw(self.ctx, t) for k, t in out.items()}

    def power_of_var(self, name: str) -> int:
        """Largest k with name^k dividing self (infinite for zero)."""
        if not self.terms:
            return float("inf")
        i = self.ctx.index(name)
        return min(m[i] for m in self.terms)

    def divide_monomial(self, mono: Monomial) -> Poly:
        out = {}
        for m, c in self.terms.items():
            mm = tuple(a - b for a, b in zip(m, mono))
            if min(mm) < 0:
                raise ArithmeticError("monomial does not divide polynomial")
            out[mm] = c
        return Poly._raw(self.ctx, out)

    def translate_to_origin(self, point: Mapping[str, Fraction | int]) -> Poly:
        images = {n: Poly.var(self.ctx, n) + Fraction(point[n]) for n in self.ctx.names}
        return self.subs(images, self.ctx)

    # -- identity ------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.ctx, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Poly({self.to_str()!r}, {self.ctx.names})"

    def to_str(self) -> str:
        return format_poly(self)


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, order: OrderKey = degrevlex) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms(order):
        mono = "*".join(
            n if e == 1 else f"{n}^{e}" for n, e in zip(p.ctx.names, m) if e
        )
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)
