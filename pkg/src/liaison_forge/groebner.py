"""Ideal engine: reduced Groebner bases, membership, dimension, colon ideals."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._engine import Kernel
from .ring import (
    MonomialOrder,
    Polynomial,
    PolyRing,
    RingMismatchError,
    change_ring,
    divide_exact,
    parse_polynomial,
    render,
)


class InhomogeneousIdealError(ValueError):
    """An operation that needs a homogeneous ideal received one that is not."""


def _kernel(ring: PolyRing) -> Kernel:
    return Kernel(ring.num_vars, ring.order.weight_rows(ring.num_vars), ring.characteristic)


@dataclass(frozen=True)
class IdealBasis:
    """An ideal given by a finite generator list (zeros are dropped)."""

    ring: PolyRing
    generators: tuple

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial] = ()):
        gens = []
        for g in generators:
            if not isinstance(g, Polynomial):
                g = ring(g)
            if g.ring != ring:
                raise RingMismatchError("generator lives in a different ring")
            if g:
                gens.append(g)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", tuple(gens))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def to_json(self) -> dict:
        return {"ring": ring_to_json(self.ring), "generators": [render(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "IdealBasis":
        ring = ring_from_json(data["ring"])
        return cls(ring, [parse_polynomial(s, ring) for s in data["generators"]])


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    """Reduced Groebner basis; elements monic and sorted by ascending leading monomial."""

    ring: PolyRing
    elements: tuple
    leading_monomials: tuple
    stats: dict = field(default_factory=dict, compare=False)
    _kernel: Kernel = field(default=None, repr=False, compare=False)
    _terms: list = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> MonomialOrder:
        return self.ring.order

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroebnerBasis)
            and self.ring == other.ring
            and self.elements == other.elements
        )

    def __hash__(self) -> int:
        return hash(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def is_unit(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()

    def is_zero(self) -> bool:
        return not self.elements

    def ideal(self) -> IdealBasis:
        return IdealBasis(self.ring, self.elements)

    def to_json(self) -> dict:
        return {
            "ring": ring_to_json(self.ring),
            "elements": [render(g) for g in self.elements],
            "leading_monomials": [list(m) for m in self.leading_monomials],
            "dimension": krull_dimension(self),
            "height": self.ring.num_vars - krull_dimension(self),
        }


def _gb_from_terms(ring: PolyRing, kernel: Kernel, terms: list, stats: dict | None = None) -> GroebnerBasis:
    elements = tuple(ring.from_dict(dict(kernel.to_pairs(g))) for g in terms)
    return GroebnerBasis(
        ring,
        elements,
        tuple(g.leading_monomial() for g in elements),
        stats or {},
        kernel,
        terms,
    )


def buchberger(ideal: IdealBasis, order: MonomialOrder | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of ``ideal`` (under ``order``, default the ring's)."""
    ring = ideal.ring
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
    kernel = _kernel(ring)
    gens = [kernel.from_pairs(g.terms) for g in ideal.generators]
    stats: dict = {}
    terms = kernel.buchberger(gens, stats)
    return _gb_from_terms(ring, kernel, terms, stats)


def groebner_from_elements(ring: PolyRing, elements: Sequence[Polynomial]) -> GroebnerBasis:
    """Wrap elements already known to form a reduced basis (e.g. from a certificate).

    Raises ValueError if they fail the S-polynomial closure test.
    """
    kernel = _kernel(ring)
    terms = [kernel.make_monic(kernel.from_pairs(g.terms)) for g in elements if g]
    if not kernel.is_groebner(terms):
        raise ValueError("elements do not form a Groebner basis")
    terms.sort(key=lambda g: g[0][0])
    return _gb_from_terms(ring, kernel, terms)


def groebner(ideal: IdealBasis) -> GroebnerBasis:
    return buchberger(ideal)


def _check_gb_ring(f: Polynomial, G: GroebnerBasis) -> None:
    if f.ring != G.ring:
        raise RingMismatchError("polynomial and Groebner basis use different rings or orders")


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Remainder of complete multivariate division of ``f`` by ``G``."""
    _check_gb_ring(f, G)
    kernel = G._kernel
    lms = [g[0][0] for g in G._terms]
    rem = kernel.reduce(kernel.from_pairs(f.terms), G._terms, lms)
    return G.ring.from_dict(dict(kernel.to_pairs(rem)))


def is_member(f: Polynomial, G: GroebnerBasis) -> bool:
    return normal_form(f, G).is_zero()


def spolynomials_reduce_to_zero(G: GroebnerBasis) -> bool:
    """S-pair closure test without any pruning criteria."""
    return G._kernel.is_groebner(G._terms)


# ---------------------------------------------------------------- dimension


def _independent_dimension(n: int, leading: Iterable[tuple]) -> int:
    supports = set()
    for e in leading:
        supports.add(sum(1 << i for i, a in enumerate(e) if a))
    if 0 in supports:
        return -1
    # only inclusion-minimal supports matter
    minimal = [s for s in supports if not any(t != s and t & s == t for t in supports)]
    full = (1 << n) - 1
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in combo)
            if all(s & ~mask for s in minimal):
                return size
    return 0  # unreachable: the empty set is always independent


def krull_dimension(G: GroebnerBasis) -> int:
    """Krull dimension of R/<G>; -1 for the unit ideal.

    Largest set of variables containing the support of no leading monomial.
    """
    return _independent_dimension(G.ring.num_vars, G.leading_monomials)


def _require_homogeneous(ideal: IdealBasis) -> None:
    if not ideal.is_homogeneous():
        raise InhomogeneousIdealError("operation requires a homogeneous ideal")


def height(ideal: IdealBasis, G: GroebnerBasis | None = None) -> int:
    """``num_vars - dim R/I`` for a homogeneous ideal (num_vars + 1 for the unit ideal)."""
    _require_homogeneous(ideal)
    if G is None:
        G = buchberger(ideal)
    return ideal.ring.num_vars - krull_dimension(G)


# ---------------------------------------------------------------- containment


def ideal_contains(I: IdealBasis, J: IdealBasis, G_I: GroebnerBasis | None = None) -> bool:
    """True iff J is contained in I."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals live in different rings")
    G = G_I if G_I is not None else buchberger(I)
    return all(is_member(g, G) for g in J.generators)


def ideal_equal(I: IdealBasis, J: IdealBasis) -> bool:
    if I.ring != J.ring:
        raise RingMismatchError("ideals live in different rings")
    return buchberger(I).elements == buchberger(J).elements


# ---------------------------------------------------------------- elimination


def _eliminate_first(ring: PolyRing, extended: PolyRing, polys: list[Polynomial]) -> IdealBasis:
    """GB of ``polys`` in ``extended`` (one extra leading variable), keeping the part free of it."""
    G = buchberger(IdealBasis(extended, polys))
    keep = []
    positions = range(ring.num_vars)
    for g in G.elements:
        if all(e[0] == 0 for e, _ in g.terms):
            data = {e[1:]: c for e, c in g.terms}
            keep.append(ring.from_dict(data))
    return IdealBasis(ring, keep)


def _extended_ring(ring: PolyRing, name: str = "u_elim") -> PolyRing:
    while name in ring.var_names:
        name += "_"
    return PolyRing((name,) + ring.var_names, ring.field, MonomialOrder.elimination(1))


def _lift(f: Polynomial, ext: PolyRing) -> Polynomial:
    return change_ring(f, ext, range(1, ext.num_vars))


def intersect(I: IdealBasis, J: IdealBasis) -> IdealBasis:
    """I ∩ J by eliminating u from u*I + (1-u)*J."""
    if I.ring != J.ring:
        raise RingMismatchError("ideals live in different rings")
    ring = I.ring
    ext = _extended_ring(ring)
    u = ext.gen(0)
    polys = [u * _lift(g, ext) for g in I.generators]
    polys += [(1 - u) * _lift(g, ext) for g in J.generators]
    return _eliminate_first(ring, ext, polys)


def ideal_quotient(I: IdealBasis, f: Polynomial) -> IdealBasis:
    """(I : f), from generators of I ∩ (f) divided by f."""
    if f.is_zero():
        raise ValueError("colon by the zero polynomial")
    if f.ring != I.ring:
        raise RingMismatchError("polynomial and ideal live in different rings")
    inter = intersect(I, IdealBasis(I.ring, [f]))
    return IdealBasis(I.ring, [divide_exact(h, f) for h in inter.generators])


def saturate_by(I: IdealBasis, f: Polynomial) -> IdealBasis:
    """(I : f^∞), eliminating u from I + (1 - u*f)."""
    if f.is_zero():
        raise ValueError("saturation by the zero polynomial")
    if f.ring != I.ring:
        raise RingMismatchError("polynomial and ideal live in different rings")
    ring = I.ring
    ext = _extended_ring(ring)
    u = ext.gen(0)
    polys = [_lift(g, ext) for g in I.generators] + [1 - u * _lift(f, ext)]
    result = _eliminate_first(ring, ext, polys)
    if I.is_homogeneous() and f.is_homogeneous() and not result.is_homogeneous():
        raise ArithmeticError("saturation of a homogeneous ideal lost homogeneity")
    return result


def saturate_irrelevant(I: IdealBasis) -> IdealBasis:
    """H^0_*(I) = I : m^∞ as the intersection of the saturations by each variable.

    Each (I : x_i^∞) contains I, so the intersection collapses to I as soon
    as one variable is a nonzerodivisor modulo I.
    """
    _require_homogeneous(I)
    ring = I.ring
    G_I = buchberger(I)
    if G_I.is_unit():
        return IdealBasis(ring, [ring.one()])
    parts = []
    for x in ring.gens():
        S = saturate_by(I, x)
        if ideal_contains(I, S, G_I):
            return IdealBasis(ring, G_I.elements)
        parts.append(S)
    result = parts[0]
    for S in parts[1:]:
        result = intersect(result, S)
    return IdealBasis(ring, buchberger(result).elements)


def is_saturated(I: IdealBasis) -> bool:
    return ideal_equal(I, saturate_irrelevant(I))


# ---------------------------------------------------------------- generators


def _row_reduce_rank(rows: list[dict], fld) -> int:
    """Rank of sparse coefficient vectors (dicts keyed by monomial) over the field."""
    pivots: dict = {}
    rank = 0
    norm = fld.normalize
    for row in rows:
        row = dict(row)
        while row:
            lead = max(row)
            if lead in pivots:
                prow = pivots[lead]
                c = row[lead]
                for k, v in prow.items():
                    nv = norm(row.get(k, 0) - c * v)
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            else:
                inv = fld.inv(row[lead])
                pivots[lead] = {k: norm(v * inv) for k, v in row.items()}
                rank += 1
                break
    return rank


def minimal_generator_count(I: IdealBasis) -> int:
    """μ(I) for a homogeneous ideal, by graded Nakayama.

    Generators are processed degree by degree; in each degree the count of
    new minimal generators is the rank of their normal forms modulo the
    ideal spanned by the generators kept in lower degrees.
    """
    _require_homogeneous(I)
    ring = I.ring
    fld = ring.field
    by_degree: dict = {}
    for g in I.generators:
        by_degree.setdefault(g.total_degree(), []).append(g)
    kept: list = []
    count = 0
    key = ring.sort_key()
    for d in sorted(by_degree):
        gens = by_degree[d]
        if kept:
            G = buchberger(IdealBasis(ring, kept))
            if G.is_unit():
                break
            forms = [normal_form(g, G) for g in gens]
        else:
            forms = list(gens)
        rows = [{key(e): c for e, c in f.terms} for f in forms if f]
        r = _row_reduce_rank(rows, fld)
        count += r
        kept.extend(f for f in forms if f)
    return count


def is_complete_intersection(I: IdealBasis) -> bool:
    """μ(I) == height(I) for a proper, nonzero homogeneous ideal."""
    _require_homogeneous(I)
    G = buchberger(I)
    if G.is_zero():
        raise ValueError("the zero ideal is not a complete intersection candidate")
    if G.is_unit():
        raise ValueError("the unit ideal is not a complete intersection candidate")
    return minimal_generator_count(I) == height(I, G)


# ---------------------------------------------------------------- JSON


def ring_to_json(ring: PolyRing) -> dict:
    return {"vars": list(ring.var_names), "char": ring.characteristic, "order": ring.order.label()}


def ring_from_json(data: dict) -> PolyRing:
    from .ring import field_from_char

    if not isinstance(data, dict) or "vars" not in data:
        raise ValueError("ring description needs a 'vars' list")
    return PolyRing(
        tuple(data["vars"]),
        field_from_char(int(data.get("char", 0))),
        MonomialOrder.from_label(data.get("order", "grevlex")),
    )
