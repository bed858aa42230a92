"""Buchberger kernel on packed-integer monomials.

A monomial is packed into one Python int: the high part holds the order's
weight vector (so integer comparison *is* the monomial order) and the low
part holds the raw exponents in guarded fields (so divisibility is a single
subtraction and mask test).  Both parts are linear in the exponents, so
monomial multiplication is integer addition.

Internal polynomials are lists of ``(packed, coeff)`` in descending order.
Over Z/p coefficients are ints mod p and basis elements are monic.  Over Q
the Buchberger loop runs fraction-free on primitive integer polynomials,
while normal forms against a finished basis use exact Fractions.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd

FIELD_BITS = 24  # exponent fields keep the top bit as a borrow guard


class MonomialCodec:
    def __init__(self, num_vars: int, weight_rows: list[list[int]]):
        self.n = num_vars
        self.rows = weight_rows
        self.exp_bits = FIELD_BITS * num_vars
        self.exp_mask = (1 << self.exp_bits) - 1
        self.field_mask = (1 << FIELD_BITS) - 1
        self.guards = sum(1 << (FIELD_BITS * i + FIELD_BITS - 1) for i in range(num_vars))
        self.max_exp = (1 << (FIELD_BITS - 1)) - 1
        r = len(weight_rows)
        self._shifts = [FIELD_BITS * (r - 1 - k) + self.exp_bits for k in range(r)]

    def encode(self, exps) -> int:
        if max(exps, default=0) > self.max_exp:
            raise OverflowError("exponent too large for packed monomials")
        low = 0
        for i, a in enumerate(exps):
            low |= a << (FIELD_BITS * i)
        high = 0
        for row, shift in zip(self.rows, self._shifts):
            w = 0
            for c, a in zip(row, exps):
                if c:
                    w += c * a
            high |= w << shift
        return high | low

    def decode(self, m: int) -> tuple:
        fm = self.field_mask
        return tuple((m >> (FIELD_BITS * i)) & fm for i in range(self.n))

    def divides(self, a: int, b: int) -> bool:
        g = self.guards
        mask = self.exp_mask
        return (((b & mask) | g) - (a & mask)) & g == g

    def lcm(self, a: int, b: int) -> int:
        return self.encode(tuple(map(max, self.decode(a), self.decode(b))))

    def coprime(self, a: int, b: int) -> bool:
        da, db = self.decode(a), self.decode(b)
        return not any(x and y for x, y in zip(da, db))

    def degree(self, m: int) -> int:
        return sum(self.decode(m))


class Kernel:
    """Arithmetic context for one (variables, order, field) triple."""

    def __init__(self, num_vars: int, weight_rows: list[list[int]], characteristic: int):
        self.codec = MonomialCodec(num_vars, weight_rows)
        self.p = characteristic

    # -- conversion

    def from_pairs(self, pairs) -> list:
        """``pairs`` of (exponents, coeff) -> internal descending term list."""
        enc = self.codec.encode
        terms = [(enc(e), c) for e, c in pairs]
        terms.sort(reverse=True, key=lambda t: t[0])
        return terms

    def to_pairs(self, terms) -> list:
        dec = self.codec.decode
        return [(dec(m), c) for m, c in terms]

    def make_monic(self, terms) -> list:
        if not terms:
            return terms
        lc = terms[0][1]
        if self.p:
            if lc == 1:
                return terms
            inv = pow(lc, -1, self.p)
            p = self.p
            return [(m, c * inv % p) for m, c in terms]
        return [(m, Fraction(c) / lc) for m, c in terms]

    def make_primitive(self, terms) -> list:
        """Integer terms with content 1 and positive leading coefficient (Q only)."""
        if not terms:
            return terms
        den = 1
        for _, c in terms:
            if isinstance(c, Fraction):
                den = den * c.denominator // gcd(den, c.denominator)
        ints = [(m, int(c * den)) for m, c in terms]
        g = 0
        for _, c in ints:
            g = gcd(g, c)
            if g == 1:
                break
        if ints[0][1] < 0:
            g = -g
        if g != 1:
            ints = [(m, c // g) for m, c in ints]
        return ints

    def normalize_new(self, terms) -> list:
        return self.make_monic(terms) if self.p else self.make_primitive(terms)

    # -- reduction

    def _find_reducer(self, m: int, lms: list) -> int:
        g = self.codec.guards
        mask = self.codec.exp_mask
        probe = (m & mask) | g
        for idx, lm in enumerate(lms):
            if (probe - (lm & mask)) & g == g:
                return idx
        return -1

    def reduce(self, f: list, basis: list, lms: list) -> list:
        """Full normal form of ``f`` by ``basis`` (monic over Z/p, monic Fraction over Q)."""
        if not f:
            return []
        if self.p:
            return self._reduce_modp(f, basis, lms)
        return self._reduce_frac(f, basis, lms)

    def _reduce_modp(self, f, basis, lms):
        p = self.p
        acc = dict(f)
        heap = [-m for m in acc]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        find = self._find_reducer
        result = []
        while heap:
            m = -pop(heap)
            c = acc.pop(m, 0)
            if not c:
                continue
            idx = find(m, lms)
            if idx < 0:
                result.append((m, c))
                continue
            g = basis[idx]
            q = m - g[0][0]
            nc = p - c
            get = acc.get
            for gm, gc in g[1:]:
                nm = q + gm
                v = get(nm)
                if v is None:
                    acc[nm] = nc * gc % p
                    push(heap, -nm)
                else:
                    v = (v + nc * gc) % p
                    if v:
                        acc[nm] = v
                    else:
                        del acc[nm]
        return result

    def _reduce_frac(self, f, basis, lms):
        acc = dict(f)
        heap = [-m for m in acc]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        find = self._find_reducer
        result = []
        while heap:
            m = -pop(heap)
            c = acc.pop(m, 0)
            if not c:
                continue
            idx = find(m, lms)
            if idx < 0:
                result.append((m, c))
                continue
            g = basis[idx]
            q = m - g[0][0]
            get = acc.get
            for gm, gc in g[1:]:
                nm = q + gm
                v = get(nm)
                if v is None:
                    acc[nm] = -c * gc
                    push(heap, -nm)
                else:
                    v = v - c * gc
                    if v:
                        acc[nm] = v
                    else:
                        del acc[nm]
        return result

    def reduce_integer(self, f: list, basis: list, lms: list) -> list:
        """Fraction-free reduction over Z; result is primitive (content removed)."""
        acc = dict(f)
        heap = [-m for m in acc]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        find = self._find_reducer
        result = []
        while heap:
            m = -pop(heap)
            c = acc.pop(m, 0)
            if not c:
                continue
            idx = find(m, lms)
            if idx < 0:
                result.append((m, c))
                continue
            g = basis[idx]
            a = g[0][1]
            d = gcd(a, c)
            mult, fac = a // d, c // d
            if mult != 1:
                for k in acc:
                    acc[k] *= mult
                result = [(rm, rc * mult) for rm, rc in result]
            q = m - g[0][0]
            get = acc.get
            for gm, gc in g[1:]:
                nm = q + gm
                v = get(nm)
                if v is None:
                    acc[nm] = -fac * gc
                    push(heap, -nm)
                else:
                    v = v - fac * gc
                    if v:
                        acc[nm] = v
                    else:
                        del acc[nm]
        return self.make_primitive(result)

    # -- S-polynomials

    def spoly(self, f: list, g: list) -> list:
        lcm = self.codec.lcm(f[0][0], g[0][0])
        qf = lcm - f[0][0]
        qg = lcm - g[0][0]
        a, b = f[0][1], g[0][1]
        if self.p:
            p = self.p
            acc: dict = {}
            for m, c in f[1:]:
                acc[qf + m] = c * b % p
            for m, c in g[1:]:
                k = qg + m
                v = (acc.get(k, 0) - c * a) % p
                if v:
                    acc[k] = v
                else:
                    acc.pop(k, None)
        else:
            if isinstance(a, int) and isinstance(b, int):
                d = gcd(a, b)
                fa, fb = b // d, a // d
            else:
                fa, fb = b, a
            acc = {}
            for m, c in f[1:]:
                acc[qf + m] = c * fa
            for m, c in g[1:]:
                k = qg + m
                v = acc.get(k, 0) - c * fb
                if v:
                    acc[k] = v
                else:
                    acc.pop(k, None)
        return sorted(acc.items(), reverse=True, key=lambda t: t[0])

    # -- Buchberger

    def buchberger(self, gens: list, stats: dict | None = None) -> list:
        """Reduced Groebner basis of the ideal generated by ``gens``.

        Normal selection strategy (lcm degree, then pair index) with
        Buchberger's coprime and chain criteria.  Returns monic elements
        sorted by ascending leading monomial.
        """
        codec = self.codec
        integer = not self.p
        G: list = []
        lms: list = []
        pairs: list = []
        pending: set = set()

        def add(h):
            n = len(G)
            G.append(h)
            lms.append(h[0][0])
            for i in range(n):
                lcm = codec.lcm(lms[i], lms[n])
                heapq.heappush(pairs, (codec.degree(lcm), i, n, lcm))
                pending.add((i, n))

        for f in gens:
            if f:
                f = self.make_primitive(f) if integer else self.make_monic(f)
                if f[0][0] == 0:
                    return [self.make_monic([f[0]])]
                add(f)

        reductions = zero_reductions = skipped1 = skipped2 = 0
        while pairs:
            _, i, j, lcm = heapq.heappop(pairs)
            pending.discard((i, j))
            if codec.coprime(lms[i], lms[j]):
                skipped1 += 1
                continue
            if self._chain_criterion(i, j, lcm, lms, pending):
                skipped2 += 1
                continue
            s = self.spoly(G[i], G[j])
            reductions += 1
            h = self.reduce_integer(s, G, lms) if integer else self._reduce_modp(s, G, lms)
            if not h:
                zero_reductions += 1
                continue
            if not integer:
                h = self.make_monic(h)
            if h[0][0] == 0:
                G, lms = [h], [0]
                break
            add(h)

        if stats is not None:
            stats.update(
                pairs_reduced=reductions,
                zero_reductions=zero_reductions,
                criterion1=skipped1,
                criterion2=skipped2,
            )
        return self._reduce_basis(G, lms)

    def _chain_criterion(self, i, j, lcm, lms, pending) -> bool:
        # skip (i, j) if another leading monomial divides the lcm and both of
        # its pairs with i and j have already been treated
        divides = self.codec.divides
        for k in range(len(lms)):
            if k == i or k == j:
                continue
            if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
                continue
            if divides(lms[k], lcm):
                return True
        return False

    def _reduce_basis(self, G: list, lms: list) -> list:
        codec = self.codec
        order = sorted(range(len(G)), key=lambda i: lms[i])
        keep: list = []
        for pos, i in enumerate(order):
            lm = lms[i]
            redundant = False
            for k in order[:pos]:
                if codec.divides(lms[k], lm):
                    redundant = True
                    break
            if not redundant:
                for k in order[pos + 1:]:
                    if lms[k] != lm and codec.divides(lms[k], lm):
                        redundant = True
                        break
            if not redundant:
                keep.append(i)
        monic = [self.make_monic(G[i]) for i in keep]
        final = []
        for idx in range(len(monic)):
            others = monic[:idx] + monic[idx + 1:]
            olms = [g[0][0] for g in others]
            head = monic[idx][0]
            tail = self.reduce(monic[idx][1:], others, olms)
            final.append([head] + tail)
            monic[idx] = final[-1]
        final.sort(key=lambda g: g[0][0])
        return final

    def is_groebner(self, basis: list) -> bool:
        """Every S-polynomial of the basis reduces to zero (no criteria applied)."""
        work = [self.make_monic(g) for g in basis]
        lms = [g[0][0] for g in work]
        for j in range(len(work)):
            for i in range(j):
                s = self.spoly(work[i], work[j])
                if self.reduce(s, work, lms):
                    return False
        return True

