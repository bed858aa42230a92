"""Polynomial matrices: minors, minor ideals, gradings, symmetric congruences."""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .groebner import IdealBasis, ring_from_json, ring_to_json
from .ring import Polynomial, PolyRing, divide_exact, parse_polynomial, render

GENERAL = "general"
SYMMETRIC = "symmetric"
ALMOST_SYMMETRIC = "almost_symmetric"
STRUCTURES = (GENERAL, SYMMETRIC, ALMOST_SYMMETRIC)

SCALAR_BOUND = 16


class StructureError(ValueError):
    """A matrix lacks the symmetry structure an operation requires."""


class NoGradingError(ValueError):
    """No consistent degree grading exists for the matrix."""


class CharTwoDiagonalWarning(UserWarning):
    """Symmetric congruences in characteristic 2 keep a zero diagonal zero."""


@dataclass(frozen=True)
class MinorIndex:
    rows: tuple
    cols: tuple

    def __post_init__(self):
        rows, cols = tuple(self.rows), tuple(self.cols)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        if len(rows) != len(cols):
            raise ValueError("minor needs equally many rows and columns")
        if any(a >= b for a, b in zip(rows, rows[1:])) or any(a >= b for a, b in zip(cols, cols[1:])):
            raise ValueError("minor indices must be strictly increasing")

    @property
    def size(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class DegreeGrading:
    row_degrees: tuple
    col_degrees: tuple
    consistent: bool = True


class PolyMatrix:
    """Immutable rectangular matrix of polynomials over one ring."""

    __slots__ = ("ring", "nrows", "ncols", "entries", "structure")

    def __init__(self, ring: PolyRing, entries: Sequence[Sequence], structure: str = GENERAL):
        rows = [tuple(ring(e) for e in row) for row in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix rows")
        if structure not in STRUCTURES:
            raise ValueError(f"unknown structure {structure!r}")
        self.ring = ring
        self.nrows = len(rows)
        self.ncols = ncols
        self.entries = tuple(rows)
        self.structure = structure
        if structure == SYMMETRIC:
            if self.nrows != self.ncols:
                raise StructureError("symmetric matrix must be square")
            if not _block_symmetric(self.entries, self.nrows):
                raise StructureError("matrix is not symmetric")
        elif structure == ALMOST_SYMMETRIC:
            if self.ncols != self.nrows + 1:
                raise StructureError("almost-symmetric matrix must be (m-1) x m")
            if not _block_symmetric(self.entries, self.nrows):
                raise StructureError("left square block is not symmetric")

    @property
    def shape(self) -> tuple:
        return self.nrows, self.ncols

    @property
    def m(self) -> int:
        """Size parameter m: order of a symmetric matrix, column count of an almost-symmetric one."""
        return self.ncols

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.ring == other.ring
            and self.entries == other.entries
            and self.structure == other.structure
        )

    def __hash__(self) -> int:
        return hash((self.entries, self.structure))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(render(e) for e in row) for row in self.entries)
        return f"PolyMatrix[{self.structure} {self.nrows}x{self.ncols}]({body})"

    def transpose(self) -> "PolyMatrix":
        cols = list(zip(*self.entries))
        return PolyMatrix(self.ring, cols, SYMMETRIC if self.structure == SYMMETRIC else GENERAL)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        zero = self.ring.zero()
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ring, out)

    def with_structure(self, structure: str) -> "PolyMatrix":
        return PolyMatrix(self.ring, self.entries, structure)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> list:
        return [[self.entries[i][j] for j in cols] for i in rows]

    def change_ring(self, ring: PolyRing) -> "PolyMatrix":
        """Re-read every entry (via its text form) in another ring."""
        return PolyMatrix(
            ring,
            [[parse_polynomial(render(e), ring) for e in row] for row in self.entries],
            self.structure,
        )

    def to_json(self) -> dict:
        return {
            "ring": ring_to_json(self.ring),
            "structure": self.structure,
            "entries": [[render(e) for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict, ring: PolyRing | None = None) -> "PolyMatrix":
        if not isinstance(data, dict) or "entries" not in data:
            raise ValueError("matrix JSON needs 'ring' and 'entries'")
        ring = ring or ring_from_json(data["ring"])
        entries = [[parse_polynomial(s, ring) for s in row] for row in data["entries"]]
        return cls(ring, entries, data.get("structure", GENERAL))


def _block_symmetric(entries, k: int) -> bool:
    return all(entries[i][j] == entries[j][i] for i in range(k) for j in range(i + 1, k))


# ---------------------------------------------------------------- determinants


def _cofactor_det(rows: list) -> Polynomial:
    """Laplace expansion along the first row, memoised on column subsets."""
    n = len(rows)
    ring = rows[0][0].ring
    memo: dict = {}

    def det(r: int, cols: tuple) -> Polynomial:
        if r == n:
            return ring.one()
        hit = memo.get(cols)
        if hit is not None:
            return hit
        total = ring.zero()
        for pos, j in enumerate(cols):
            a = rows[r][j]
            if not a:
                continue
            sub = det(r + 1, cols[:pos] + cols[pos + 1:])
            if not sub:
                continue
            term = a * sub
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return det(0, tuple(range(n)))


def _bareiss_det(rows: list) -> Polynomial | None:
    """Fraction-free elimination; ``None`` when a zero pivot blocks it."""
    n = len(rows)
    a = [list(r) for r in rows]
    ring = a[0][0].ring
    prev = ring.one()
    for k in range(n - 1):
        pivot = a[k][k]
        if not pivot:
            return None
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = divide_exact(num, prev) if not prev.is_constant() else num.scale(
                    ring.field.inv(prev.leading_coefficient())
                )
        prev = pivot
    return a[n - 1][n - 1]


def determinant(rows: list) -> Polynomial:
    n = len(rows)
    if n == 0:
        raise ValueError("empty determinant")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    d = _bareiss_det(rows)
    if d is None:
        d = _cofactor_det(rows)
    return d


def cofactor_determinant(rows: list) -> Polynomial:
    return _cofactor_det(rows)


def minor(M: PolyMatrix, idx: MinorIndex) -> Polynomial:
    """Determinant of the submatrix on ``idx.rows`` x ``idx.cols`` (0-based)."""
    if not isinstance(idx, MinorIndex):
        idx = MinorIndex(*idx)
    if idx.size == 0:
        return M.ring.one()
    if idx.rows[-1] >= M.nrows or idx.cols[-1] >= M.ncols or idx.rows[0] < 0 or idx.cols[0] < 0:
        raise IndexError(f"minor index {idx} out of range for {M.nrows}x{M.ncols} matrix")
    return determinant(M.submatrix(idx.rows, idx.cols))


def ordered_minor(M: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> Polynomial:
    """Determinant with rows and columns taken in the given (possibly unsorted) order."""
    if len(rows) != len(cols):
        raise ValueError("minor needs equally many rows and columns")
    if len(set(rows)) < len(rows) or len(set(cols)) < len(cols):
        return M.ring.zero()
    sign = _perm_sign(rows) * _perm_sign(cols)
    d = minor(M, MinorIndex(tuple(sorted(rows)), tuple(sorted(cols))))
    return d if sign > 0 else -d


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv % 2 else 1


class MinorCache:
    """Memoised minors of one matrix; symmetric matrices share (R, C) and (C, R)."""

    def __init__(self, M: PolyMatrix):
        self.M = M
        self.symmetric = M.structure == SYMMETRIC
        self._cache: dict = {}

    def __call__(self, rows: Sequence[int], cols: Sequence[int]) -> Polynomial:
        rows, cols = tuple(rows), tuple(cols)
        key = (rows, cols)
        if self.symmetric and cols < rows:
            key = (cols, rows)
        hit = self._cache.get(key)
        if hit is None:
            hit = minor(self.M, MinorIndex(*key))
            self._cache[key] = hit
        return hit


def minor_indices(nrows: int, ncols: int, t: int):
    for rows in itertools.combinations(range(nrows), t):
        for cols in itertools.combinations(range(ncols), t):
            yield MinorIndex(rows, cols)


def minor_ideal(M: PolyMatrix, t: int, cache: MinorCache | None = None) -> IdealBasis:
    """Ideal of all t x t minors, zeros and duplicates up to sign removed.

    Generators follow the lexicographic order of their minor index.
    """
    if not 1 <= t <= min(M.nrows, M.ncols):
        raise ValueError(f"minor size {t} out of range for a {M.nrows}x{M.ncols} matrix")
    cache = cache or MinorCache(M)
    seen = set()
    gens = []
    for idx in minor_indices(M.nrows, M.ncols, t):
        d = cache(idx.rows, idx.cols)
        if not d or d.terms in seen:
            continue
        seen.add(d.terms)
        seen.add((-d).terms)
        gens.append(d)
    return IdealBasis(M.ring, gens)


def minor_ideal_or_zero(M: PolyMatrix, t: int) -> IdealBasis:
    """As :func:`minor_ideal`, but the zero ideal when t exceeds the matrix size."""
    if t > min(M.nrows, M.ncols):
        return IdealBasis(M.ring, [])
    return minor_ideal(M, t)


# ---------------------------------------------------------------- gradings


def _entry_degree(f: Polynomial):
    if not f.is_homogeneous():
        return None
    return f.total_degree()


def infer_grading(M: PolyMatrix) -> DegreeGrading | None:
    """Row/column degrees with deg M[i][j] = d_i + e_j for every nonzero entry.

    Solved on the bipartite graph of nonzero entries; each connected piece is
    normalised so its smallest row degree is 0.  Returns ``None`` when an
    entry is inhomogeneous or the constraints are contradictory.
    """
    n, k = M.nrows, M.ncols
    weights = {}
    for i in range(n):
        for j in range(k):
            f = M.entries[i][j]
            if f:
                d = _entry_degree(f)
                if d is None:
                    return None
                weights[(i, j)] = d
    adj: dict = {("r", i): [] for i in range(n)}
    adj.update({("c", j): [] for j in range(k)})
    for (i, j), d in weights.items():
        adj[("r", i)].append((("c", j), d))
        adj[("c", j)].append((("r", i), d))
    value: dict = {}
    for start in adj:
        if start in value:
            continue
        value[start] = 0
        comp = [start]
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nxt, d in adj[node]:
                want = d - value[node]
                if nxt not in value:
                    value[nxt] = want
                    comp.append(nxt)
                    queue.append(nxt)
                elif value[nxt] != want:
                    return None
        rows = [value[v] for v in comp if v[0] == "r"]
        shift = min(rows) if rows else 0
        for v in comp:
            value[v] += -shift if v[0] == "r" else shift
    return DegreeGrading(
        tuple(value[("r", i)] for i in range(n)),
        tuple(value[("c", j)] for j in range(k)),
    )


def symmetric_grading(M: PolyMatrix) -> tuple | None:
    """Degrees d and offset s with deg M[i][j] = d_i + d_j + s for nonzero entries.

    This is the grading a symmetric congruence must respect; normalised with
    min(d) = 0.  ``None`` if it does not exist.
    """
    if M.structure != SYMMETRIC:
        raise StructureError("symmetric grading needs a symmetric matrix")
    m = M.nrows
    weights = {}
    for i in range(m):
        for j in range(i, m):
            f = M.entries[i][j]
            if f:
                d = _entry_degree(f)
                if d is None:
                    return None
                weights[(i, j)] = d
    adj = {i: [] for i in range(m)}
    for (i, j), d in weights.items():
        adj[i].append((j, d))
        if i != j:
            adj[j].append((i, d))
    # with twice the unknowns D_i = 2 d_i + s every constraint reads D_i + D_j = 2w
    for parity in (0, 1):
        result = _solve_symmetric(m, adj, parity)
        if result is not None:
            return result
    return None


def _solve_symmetric(m: int, adj: dict, s: int):
    # d_i = sign_i * x_comp + base_i; odd cycles pin x_comp
    sign, base, comp_of = {}, {}, {}
    pinned: dict = {}
    comps = []
    for start in range(m):
        if start in sign:
            continue
        cid = len(comps)
        comps.append([start])
        sign[start], base[start], comp_of[start] = 1, 0, cid
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j, w in adj[i]:
                target = w - s  # d_i + d_j = w - s
                if j not in sign:
                    sign[j], base[j], comp_of[j] = -sign[i], target - base[i], cid
                    comps[cid].append(j)
                    queue.append(j)
                    continue
                if sign[i] != sign[j]:
                    if base[i] + base[j] != target:
                        return None
                    continue
                # 2 * sign * x + base_i + base_j = target
                num = target - base[i] - base[j]
                if num % 2:
                    return None
                x = (num // 2) * sign[i]
                if pinned.setdefault(cid, x) != x:
                    return None
    d = [0] * m
    for cid, members in enumerate(comps):
        # bipartite pieces keep a free shift; the global normalisation fixes it
        x = pinned.get(cid, 0)
        for i in members:
            d[i] = sign[i] * x + base[i]
    low = min(d)
    d = [v - low for v in d]
    return tuple(d), s + 2 * low


def is_t_homogeneous(M: PolyMatrix, t: int) -> bool:
    """All s x s minors homogeneous for s <= t (fast path: a consistent grading exists)."""
    if not 1 <= t <= min(M.nrows, M.ncols):
        raise ValueError(f"t = {t} out of range")
    if infer_grading(M) is not None:
        return True
    cache = MinorCache(M)
    for s in range(1, t + 1):
        for idx in minor_indices(M.nrows, M.ncols, s):
            if not cache(idx.rows, idx.cols).is_homogeneous():
                return False
    return True


# ---------------------------------------------------------------- structure


def delete_last_row(M: PolyMatrix) -> PolyMatrix:
    """Symmetric m x m -> almost-symmetric (m-1) x m."""
    if M.structure != SYMMETRIC:
        raise StructureError("delete_last_row expects a symmetric matrix")
    if M.nrows < 2:
        raise StructureError("cannot delete the only row of a 1x1 matrix")
    return PolyMatrix(M.ring, M.entries[:-1], ALMOST_SYMMETRIC)


def delete_last_column(O: PolyMatrix) -> PolyMatrix:
    """Almost-symmetric (m-1) x m -> symmetric (m-1) x (m-1)."""
    if O.structure != ALMOST_SYMMETRIC:
        raise StructureError("delete_last_column expects an almost-symmetric matrix")
    return PolyMatrix(O.ring, [row[:-1] for row in O.entries], SYMMETRIC)


def delete_row(M: PolyMatrix, i: int) -> PolyMatrix:
    rows = [r for k, r in enumerate(M.entries) if k != i]
    return PolyMatrix(M.ring, rows, GENERAL)


def delete_column(M: PolyMatrix, j: int) -> PolyMatrix:
    return PolyMatrix(M.ring, [r[:j] + r[j + 1:] for r in M.entries], GENERAL)


# ---------------------------------------------------------------- congruence


def congruence(M: PolyMatrix, P: PolyMatrix) -> PolyMatrix:
    """P^T M P, tagged symmetric when M is."""
    out = P.transpose() @ M @ P
    return out.with_structure(M.structure if M.structure == SYMMETRIC else GENERAL)


def identity_matrix(ring: PolyRing, m: int) -> PolyMatrix:
    one, zero = ring.one(), ring.zero()
    return PolyMatrix(ring, [[one if i == j else zero for j in range(m)] for i in range(m)])


def _nonzero_scalar(rng: random.Random) -> int:
    v = rng.randint(1, SCALAR_BOUND)
    return v if rng.random() < 0.5 else -v


def _scalar_det(rows: list, fld) -> object:
    a = [[fld(v) for v in r] for r in rows]
    n = len(a)
    det = fld(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return fld(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = fld.normalize(-det)
        inv = fld.inv(a[k][k])
        det = fld.normalize(det * a[k][k])
        for i in range(k + 1, n):
            c = fld.normalize(a[i][k] * inv)
            if c:
                a[i] = [fld.normalize(x - c * y) for x, y in zip(a[i], a[k])]
    return det


def _random_form(ring: PolyRing, degree: int, rng: random.Random) -> Polynomial:
    n = ring.num_vars
    data = {}
    for combo in itertools.combinations_with_replacement(range(n), degree):
        e = [0] * n
        for v in combo:
            e[v] += 1
        data[tuple(e)] = _nonzero_scalar(rng)
    return ring.from_dict(data)


def random_graded_transform(M: PolyMatrix, seed: int) -> PolyMatrix:
    """Draw an invertible P compatible with M's symmetric grading.

    P[i][j] is a scalar when d_i = d_j, a random form of degree d_j - d_i
    when d_j > d_i, and zero otherwise; equal-degree blocks are invertible.
    """
    grading = symmetric_grading(M)
    if grading is None:
        raise NoGradingError("matrix has no consistent symmetric degree grading")
    d, _ = grading
    ring = M.ring
    fld = ring.field
    m = M.nrows
    rng = random.Random(seed)
    P = [[ring.zero()] * m for _ in range(m)]
    for deg in sorted(set(d)):
        block = [i for i in range(m) if d[i] == deg]
        while True:
            scal = [[_nonzero_scalar(rng) for _ in block] for _ in block]
            if _scalar_det(scal, fld):
                break
        for a, i in enumerate(block):
            for b, j in enumerate(block):
                P[i][j] = ring.constant(scal[a][b])
    for i in range(m):
        for j in range(m):
            if d[j] > d[i]:
                P[i][j] = _random_form(ring, d[j] - d[i], rng)
    return PolyMatrix(ring, P)


def generic_congruence(M: PolyMatrix, seed: int) -> tuple:
    """Seeded graded congruence: returns (P^T M P, P)."""
    if M.structure != SYMMETRIC:
        raise StructureError("generic congruence needs a symmetric matrix")
    if M.ring.characteristic == 2 and all(not M.entries[i][i] for i in range(M.nrows)):
        warnings.warn(
            "characteristic 2: every symmetric congruence keeps the zero diagonal zero",
            CharTwoDiagonalWarning,
            stacklevel=2,
        )
    P = random_graded_transform(M, seed)
    return congruence(M, P), P
