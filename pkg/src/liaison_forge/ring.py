"""Exact sparse multivariate polynomials over Q and Z/p.

A :class:`Polynomial` is an immutable, canonically ordered tuple of
``(exponents, coefficient)`` pairs, strictly descending in the ring's
monomial order.  Two polynomials are equal iff their term tuples are equal.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Iterable, Iterator, Mapping, Union

Monomial = tuple  # tuple[int, ...] of exponents, one per variable


class RingMismatchError(ValueError):
    """Operands live in different polynomial rings."""


class PolynomialParseError(ValueError):
    """Malformed polynomial text, or a construct outside the grammar."""


# ---------------------------------------------------------------- fields


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Rationals:
    """The field Q; elements are :class:`fractions.Fraction`."""

    characteristic = 0

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def normalize(self, x):
        return x

    def inv(self, x) -> Fraction:
        return 1 / Fraction(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, Rationals)

    def __hash__(self) -> int:
        return hash("QQ")

    def __repr__(self) -> str:
        return "QQ"


class PrimeField:
    """The field Z/p, elements stored as ints in ``range(p)``."""

    def __init__(self, p: int):
        if not isinstance(p, int) or not _is_prime(p):
            raise ValueError(f"characteristic {p!r} is not prime")
        if p >= 2**31:
            raise ValueError("prime fields are limited to p < 2^31")
        self.p = p

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def normalize(self, x) -> int:
        return x % self.p

    def inv(self, x) -> int:
        return pow(x, -1, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


Field = Union[Rationals, PrimeField]
QQ = Rationals()


def field_from_char(char: int) -> Field:
    return QQ if char == 0 else PrimeField(char)


# ---------------------------------------------------------------- orders


@dataclass(frozen=True)
class MonomialOrder:
    """GrevLex, Lex, or a two-block elimination order.

    ``Elimination(k)`` compares the grevlex degree/ordering of the first
    ``k`` variables first and breaks ties with grevlex on the rest, so any
    monomial involving a leading-block variable beats every monomial in the
    trailing block alone.
    """

    kind: str = "grevlex"
    block: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "elim" and self.block < 1:
            raise ValueError("elimination order needs a leading block of size >= 1")

    @classmethod
    def grevlex(cls) -> "MonomialOrder":
        return cls("grevlex")

    @classmethod
    def lex(cls) -> "MonomialOrder":
        return cls("lex")

    @classmethod
    def elimination(cls, k: int) -> "MonomialOrder":
        return cls("elim", k)

    def weight_rows(self, n: int) -> list[list[int]]:
        """Nonnegative weight matrix whose row-lexicographic comparison is this order.

        Grevlex is encoded by the partial sums ``e_1+..+e_k`` for k = n..1.
        """
        if self.kind == "lex":
            return [[int(i == r) for i in range(n)] for r in range(n)]
        if self.kind == "grevlex":
            return [[int(i < k) for i in range(n)] for k in range(n, 0, -1)]
        k = self.block
        if k > n:
            raise ValueError(f"elimination block {k} exceeds {n} variables")
        rows = [[int(i < j) for i in range(n)] for j in range(k, 0, -1)]
        rows += [[int(k <= i < j) for i in range(n)] for j in range(n, k, -1)]
        return rows

    def key_function(self, n: int) -> Callable[[Monomial], tuple]:
        """Sort key: larger key means larger monomial."""
        if self.kind == "lex":
            return tuple
        if self.kind == "grevlex":
            return lambda e: tuple(accumulate(e))[::-1]
        k = self.block
        return lambda e: tuple(accumulate(e[:k]))[::-1] + tuple(accumulate(e[k:]))[::-1]

    def label(self) -> str:
        return f"elim{self.block}" if self.kind == "elim" else self.kind

    @classmethod
    def from_label(cls, label: str) -> "MonomialOrder":
        if label.startswith("elim"):
            return cls.elimination(int(label[4:]))
        return cls(label)


GREVLEX = MonomialOrder.grevlex()


# ---------------------------------------------------------------- ring


@dataclass(frozen=True)
class PolyRing:
    var_names: tuple
    field: Field = QQ
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        names = tuple(self.var_names)
        object.__setattr__(self, "var_names", names)
        if not names:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")

    @property
    def num_vars(self) -> int:
        return len(self.var_names)

    @property
    def characteristic(self) -> int:
        return self.field.characteristic

    def sort_key(self) -> Callable[[Monomial], tuple]:
        cache = _KEY_CACHE.get((self.order, self.num_vars))
        if cache is None:
            cache = self.order.key_function(self.num_vars)
            _KEY_CACHE[(self.order, self.num_vars)] = cache
        return cache

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.var_names, self.field, order)

    def with_field(self, field: Field) -> "PolyRing":
        return PolyRing(self.var_names, field, self.order)

    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        if not c:
            return self.zero()
        return Polynomial(self, (((0,) * self.num_vars, c),))

    def monomial(self, exps: Monomial, c=1) -> "Polynomial":
        c = self.field(c)
        if len(exps) != self.num_vars or min(exps) < 0:
            raise ValueError(f"bad exponent vector {exps}")
        if not c:
            return self.zero()
        return Polynomial(self, ((tuple(exps), c),))

    def gen(self, i: int) -> "Polynomial":
        exps = [0] * self.num_vars
        exps[i] = 1
        return Polynomial(self, ((tuple(exps), self.field(1)),))

    def gens(self) -> list["Polynomial"]:
        return [self.gen(i) for i in range(self.num_vars)]

    def var(self, name: str) -> "Polynomial":
        try:
            return self.gen(self.var_names.index(name))
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def from_dict(self, data: Mapping[Monomial, object]) -> "Polynomial":
        norm = self.field
        items = []
        for e, c in data.items():
            c = norm(c)
            if c:
                items.append((tuple(e), c))
        items.sort(key=lambda t: self.sort_key()(t[0]), reverse=True)
        return Polynomial(self, tuple(items))

    def __call__(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise RingMismatchError("polynomial belongs to another ring")
            return value
        if isinstance(value, str):
            return parse_polynomial(value, self)
        return self.constant(value)

    def describe(self) -> str:
        char = self.characteristic
        fld = "QQ" if char == 0 else f"GF({char})"
        return f"{fld}[{', '.join(self.var_names)}] ({self.order.label()})"


_KEY_CACHE: dict = {}
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


# ---------------------------------------------------------------- polynomials


class Polynomial:
    """Immutable sparse polynomial; ``terms`` is strictly descending in ring order."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: tuple):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def constant_coefficient(self):
        if self.terms and not any(self.terms[-1][0]):
            return self.terms[-1][1]
        return self.ring.field(0)

    def leading_monomial(self) -> Monomial:
        return self.terms[0][0]

    def leading_coefficient(self):
        return self.terms[0][1]

    def total_degree(self) -> int | None:
        """Largest total degree of a term; ``None`` for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(e) for e, _ in self.terms)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        d = sum(self.terms[0][0])
        return all(sum(e) == d for e, _ in self.terms)

    def variables(self) -> set[int]:
        used = set()
        for e, _ in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return used

    def as_dict(self) -> dict:
        return dict(self.terms)

    # -- arithmetic

    def _check(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise RingMismatchError(
                f"cannot combine polynomials of {self.ring.describe()} and {other.ring.describe()}"
            )

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, -1)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, self, -1)

    def __neg__(self) -> "Polynomial":
        norm = self.ring.field.normalize
        return Polynomial(self.ring, tuple((e, norm(-c)) for e, c in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        fld = self.ring.field
        c = fld(c)
        if not c:
            return self.ring.zero()
        norm = fld.normalize
        return Polynomial(self.ring, tuple((e, norm(a * c)) for e, a in self.terms))

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.terms[0][1]))

    def mul_monomial(self, exps: Monomial, c=1) -> "Polynomial":
        c = self.ring.field(c)
        norm = self.ring.field.normalize
        add = operator.add
        # multiplying by a monomial preserves the order, so no re-sort needed
        return Polynomial(
            self.ring,
            tuple((tuple(map(add, e, exps)), norm(a * c)) for e, a in self.terms),
        )

    # -- comparison and hashing

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.constant(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


def _add(f: Polynomial, g: Polynomial, sign: int) -> Polynomial:
    if not g.terms:
        return f
    ring = f.ring
    norm = ring.field.normalize
    acc = dict(f.terms)
    for e, c in g.terms:
        v = acc.get(e)
        v = norm(sign * c) if v is None else norm(v + sign * c)
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)
    key = ring.sort_key()
    return Polynomial(ring, tuple(sorted(acc.items(), key=lambda t: key(t[0]), reverse=True)))


def _mul(f: Polynomial, g: Polynomial) -> Polynomial:
    ring = f.ring
    if not f.terms or not g.terms:
        return ring.zero()
    norm = ring.field.normalize
    add = operator.add
    acc: dict = {}
    get = acc.get
    for e1, c1 in f.terms:
        for e2, c2 in g.terms:
            e = tuple(map(add, e1, e2))
            acc[e] = get(e, 0) + c1 * c2
    key = ring.sort_key()
    items = [(e, norm(c)) for e, c in acc.items()]
    items = [t for t in items if t[1]]
    items.sort(key=lambda t: key(t[0]), reverse=True)
    return Polynomial(ring, tuple(items))


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    return f * g


def poly_scale(f: Polynomial, c) -> Polynomial:
    return f.scale(c)


def total_degree(f: Polynomial) -> int | None:
    return f.total_degree()


def is_homogeneous(f: Polynomial) -> bool:
    return f.is_homogeneous()


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Return q with f = q*g, or raise ArithmeticError if g does not divide f."""
    f._check(g)
    if not g.terms:
        raise ZeroDivisionError("division by the zero polynomial")
    ring = f.ring
    fld = ring.field
    lm, lc = g.terms[0]
    inv_lc = fld.inv(lc)
    sub = operator.sub
    quotient: dict = {}
    rem = f
    while rem.terms:
        e, c = rem.terms[0]
        q = tuple(map(sub, e, lm))
        if min(q) < 0:
            raise ArithmeticError("polynomial division is not exact")
        qc = fld.normalize(c * inv_lc)
        quotient[q] = qc
        rem = rem - g.mul_monomial(q, qc)
    return ring.from_dict(quotient)


def change_ring(f: Polynomial, ring: PolyRing, positions: Iterable[int] | None = None) -> Polynomial:
    """Map f into ``ring``; variable i of f's ring becomes variable ``positions[i]``.

    Coefficients are re-read in the target field.
    """
    n = ring.num_vars
    src_n = f.ring.num_vars
    pos = list(positions) if positions is not None else list(range(src_n))
    if len(pos) != src_n:
        raise ValueError("position map has the wrong length")
    data: dict = {}
    for e, c in f.terms:
        new = [0] * n
        for i, a in enumerate(e):
            if a:
                new[pos[i]] = a
        data[tuple(new)] = c
    return ring.from_dict(data)


# ---------------------------------------------------------------- text I/O


def render(f: Polynomial) -> str:
    """Text form accepted back by :func:`parse_polynomial`."""
    if not f.terms:
        return "0"
    names = f.ring.var_names
    p = f.ring.characteristic
    parts = []
    for e, c in f.terms:
        if p:
            # symmetric representative keeps small negatives readable
            c = c - p if c > p // 2 else c
        elif c.denominator != 1:
            raise ValueError("rational coefficients with denominators cannot be rendered")
        else:
            c = c.numerator
        factors = []
        for name, a in zip(names, e):
            if a == 1:
                factors.append(name)
            elif a:
                factors.append(f"{name}^{a}")
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN_RE = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            break
        pos = m.end()
        flt, num, name, sym = m.groups()
        if flt is not None:
            raise PolynomialParseError(f"float literal {flt!r} is not allowed")
        if num is not None:
            tokens.append(("num", num))
        elif name is not None:
            tokens.append(("name", name))
        elif sym is not None:
            if sym == "/":
                raise PolynomialParseError("division is not allowed in polynomial text")
            if sym not in "+-*^()":
                raise PolynomialParseError(f"unexpected character {sym!r}")
            tokens.append(("sym", sym))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ring = ring
        self.index = {name: i for i, name in enumerate(ring.var_names)}

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, sym: str) -> None:
        kind, val = self.take()
        if kind != "sym" or val != sym:
            raise PolynomialParseError(f"expected {sym!r}, found {val!r}")

    def expr(self) -> Polynomial:
        sign = 1
        kind, val = self.peek()
        if kind == "sym" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        result = self.term()
        if sign < 0:
            result = -result
        while True:
            kind, val = self.peek()
            if kind == "sym" and val in "+-":
                self.take()
                t = self.term()
                result = result + t if val == "+" else result - t
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "sym" and val == "*":
                self.take()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val = self.peek()
        if kind == "sym" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise PolynomialParseError("exponent must be a nonnegative integer")
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return self.ring.constant(int(val))
        if kind == "name":
            if val not in self.index:
                raise PolynomialParseError(f"unknown variable {val!r}")
            return self.ring.gen(self.index[val])
        if kind == "sym" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind is None:
            raise PolynomialParseError("unexpected end of input")
        raise PolynomialParseError(f"unexpected token {val!r}")


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    """Parse integer-coefficient polynomial text into ``ring``.

    >>> R = PolyRing(("x", "y"))
    >>> str(parse_polynomial("(x + y)^2 - 2*x*y", R))
    'x^2 + y^2'
    """
    if not isinstance(text, str):
        raise PolynomialParseError(f"expected a string, got {type(text).__name__}")
    parser = _Parser(text, ring)
    if not parser.tokens:
        raise PolynomialParseError("empty polynomial text")
    result = parser.expr()
    if parser.pos != len(parser.tokens):
        raise PolynomialParseError(f"trailing input at token {parser.peek()[1]!r}")
    return result
