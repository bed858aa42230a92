"""Symmetric determinantal classification and the G-biliaison descent chain.

The descent follows the construction on a symmetric t-homogeneous matrix M:
after a seeded graded congruence, delete the last row to get the
almost-symmetric O (defining Y) and then the last column to get the
symmetric N (defining X').  X and X' are linked on Y with shift
a = deg F_{m,m}; the link is certified by the cross-minor memberships
modulo I_t(O).  Iterating on (N, t-1) ends at t = 1, a complete
intersection, after exactly t-1 steps.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

from .groebner import (
    GroebnerBasis,
    IdealBasis,
    buchberger,
    groebner_from_elements,
    height,
    is_complete_intersection,
    is_member,
    is_saturated,
    krull_dimension,
    minimal_generator_count,
    normal_form,
)
from .pmatrix import (
    ALMOST_SYMMETRIC,
    GENERAL,
    SYMMETRIC,
    CharTwoDiagonalWarning,
    MinorCache,
    MinorIndex,
    PolyMatrix,
    StructureError,
    delete_last_column,
    delete_last_row,
    generic_congruence,
    is_t_homogeneous,
    minor_ideal,
    minor_ideal_or_zero,
    ordered_minor,
)
from .ring import PolyRing, render

log = logging.getLogger(__name__)

RETRY_BUDGET = 8

SYMMETRIC_VERDICT = "SymmetricDeterminantal"
ALMOST_VERDICT = "AlmostSymmetricDeterminantal"
NEITHER = "Neither"


class LiaisonError(Exception):
    """Base class for refusals and failures of the descent construction."""

    step_index: int | None = None


class PreconditionError(LiaisonError, ValueError):
    pass


class CharTwoRefused(LiaisonError):
    pass


class GenericityExhausted(LiaisonError):
    def __init__(self, message: str, attempts: list):
        super().__init__(message)
        self.attempts = attempts


class ChainObstruction(LiaisonError):
    def __init__(self, message: str, attempts: list):
        super().__init__(message)
        self.attempts = attempts


def symmetric_codim(m: int, t: int) -> int:
    """Maximal codimension C(m-t+2, 2) of I_t of a symmetric m x m matrix."""
    return comb(m - t + 2, 2)


def almost_symmetric_codim(m: int, t: int) -> int:
    """Maximal codimension C(m-t+2, 2) - 1 of I_t of an almost-symmetric (m-1) x m matrix."""
    return comb(m - t + 2, 2) - 1


# ---------------------------------------------------------------- reports


@dataclass
class ClassificationReport:
    structure: str
    m: int
    t: int
    structure_ok: bool
    t_homogeneous: bool
    saturated: bool
    expected_codim: int
    actual_codim: int
    mu: int | None
    verdict: str
    reason: str | None = None

    @property
    def positive(self) -> bool:
        return self.verdict != NEITHER

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class CrossIdentityReport:
    checked: int
    failed: int
    reduced: int
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "failed": self.failed,
            "reduced": self.reduced,
            "witnesses": [[list(map(list, w[0])), list(map(list, w[1]))] for w in self.witnesses],
        }


@dataclass
class Ht1Result:
    delta: int
    ok: bool
    ht_ItM: int
    ht_ItO: int
    seed_used: int
    retries: int
    fmm_nonzero: bool
    note: str = "height difference; Cohen-Macaulayness of R/I_t(O) assumed, not verified"

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SubmReport:
    c: int
    condition2: bool
    sufficient: bool
    ht_It1O: int
    ht_It1N: int
    note: str = (
        "condition2 is the height form of 'Y is generically a complete intersection';"
        " only the heights are computed"
    )

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SubsdReport:
    c: int
    condition2: bool
    sufficient: bool
    ht_It1M: int
    ht_It1O: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class StepCertificate:
    t: int
    M: PolyMatrix
    O: PolyMatrix
    N: PolyMatrix
    P: PolyMatrix
    seed_used: int
    retries: int
    a: int
    heights: dict
    ht1_ok: bool
    subm_condition2: bool
    subm_sufficient: bool
    identities: CrossIdentityReport
    gb_Y: GroebnerBasis
    quotient: dict
    warnings: list = field(default_factory=list)

    @property
    def identities_checked(self) -> int:
        return self.identities.checked

    @property
    def identities_failed(self) -> int:
        return self.identities.failed

    @property
    def c(self) -> int:
        return almost_symmetric_codim(self.M.m, self.t)

    def invariant_violations(self) -> list[str]:
        c = self.c
        h = self.heights
        problems = []
        if h["ht_ItM"] != c + 1:
            problems.append(f"ht I_t(M) = {h['ht_ItM']} != {c + 1}")
        if h["ht_ItO"] != c:
            problems.append(f"ht I_t(O) = {h['ht_ItO']} != {c}")
        if h["ht_It1N"] != c + 1:
            problems.append(f"ht I_t-1(N) = {h['ht_It1N']} != {c + 1}")
        if h["ht_ItM"] - h["ht_ItO"] > 1:
            problems.append("height difference exceeds 1")
        if self.identities.failed:
            problems.append(f"{self.identities.failed} cross identities failed")
        if self.a <= 0:
            problems.append(f"shift a = {self.a} is not positive")
        return problems

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "a": self.a,
            "seed_used": self.seed_used,
            "retries": self.retries,
            "heights": dict(self.heights),
            "ht1_ok": self.ht1_ok,
            "subm": {"condition2": self.subm_condition2, "sufficient": self.subm_sufficient},
            "identities": self.identities.to_json(),
            "quotient": self.quotient,
            "M": self.M.to_json(),
            "O": self.O.to_json(),
            "N": self.N.to_json(),
            "P": self.P.to_json(),
            "gb_Y": [render(g) for g in self.gb_Y.elements],
            "warnings": list(self.warnings),
        }


@dataclass
class ChainCertificate:
    input: PolyMatrix
    t: int
    seed: int
    steps: list
    terminal_ideal: IdealBasis
    terminal_is_ci: bool
    terminal_mu: int
    terminal_height: int

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "input": self.input.to_json(),
            "t": self.t,
            "seed": self.seed,
            "steps": [s.to_json() for s in self.steps],
            "terminal": {
                "generators": [render(g) for g in self.terminal_ideal.generators],
                "mu": self.terminal_mu,
                "height": self.terminal_height,
                "is_ci": self.terminal_is_ci,
            },
        }


# ---------------------------------------------------------------- predicates


def no_invertible_entries(M: PolyMatrix) -> bool:
    """True iff no entry is a nonzero constant."""
    return not any(e and e.is_constant() for row in M.entries for e in row)


def _classify(M: PolyMatrix, t: int, m: int, expected: int, positive: str) -> ClassificationReport:
    if not 1 <= t <= min(M.nrows, M.ncols):
        raise ValueError(f"minor size t = {t} out of range for a {M.nrows}x{M.ncols} matrix")
    t_hom = is_t_homogeneous(M, t)
    I = minor_ideal(M, t)
    G = buchberger(I)
    actual = M.ring.num_vars - krull_dimension(G)
    homogeneous = I.is_homogeneous()
    saturated = homogeneous and is_saturated(I)
    mu = minimal_generator_count(I) if homogeneous else None
    reason = None
    if not t_hom:
        reason = f"matrix is not {t}-homogeneous"
    elif not saturated:
        reason = f"I_{t} is not saturated"
    elif actual != expected:
        reason = f"codimension {actual} != expected {expected}"
    return ClassificationReport(
        structure=M.structure,
        m=m,
        t=t,
        structure_ok=True,
        t_homogeneous=t_hom,
        saturated=saturated,
        expected_codim=expected,
        actual_codim=actual,
        mu=mu,
        verdict=positive if reason is None else NEITHER,
        reason=reason,
    )


def classify(M: PolyMatrix, t: int) -> ClassificationReport:
    """Decide whether I_t(M) defines a symmetric determinantal scheme.

    Almost-symmetric input is delegated to :func:`classify_almost`.
    """
    if M.structure == ALMOST_SYMMETRIC:
        return classify_almost(M, t)
    if M.structure != SYMMETRIC:
        raise StructureError("classification needs a symmetric or almost-symmetric matrix")
    m = M.nrows
    return _classify(M, t, m, symmetric_codim(m, t), SYMMETRIC_VERDICT)


def classify_almost(O: PolyMatrix, t: int) -> ClassificationReport:
    if O.structure != ALMOST_SYMMETRIC:
        raise StructureError("classify_almost needs an almost-symmetric matrix")
    m = O.ncols
    return _classify(O, t, m, almost_symmetric_codim(m, t), ALMOST_VERDICT)


# ---------------------------------------------------------------- identities


def _tuples(n: int, size: int) -> list:
    return list(itertools.combinations(range(n), size))


def verify_cross_identities(M: PolyMatrix, t: int, G_Y: GroebnerBasis) -> CrossIdentityReport:
    """Reduce every M_{i,m;j,m} M_{k;l} - M_{k,m;l,m} M_{i;j} modulo I_t(O).

    Indices i, j, k, l range over (t-1)-subsets of the first m-1 rows and
    columns.  Ordered pairs are all counted; a pair and its swap differ by
    sign, and a pair with itself is identically zero, so only the unordered
    distinct pairs are actually reduced.
    """
    if t < 2:
        raise ValueError("cross identities need t >= 2")
    if M.structure != SYMMETRIC:
        raise StructureError("cross identities are stated for a symmetric matrix")
    if G_Y.ring != M.ring:
        raise ValueError("Groebner basis ring does not match the matrix ring")
    m = M.nrows
    O = delete_last_row(M)
    if not all(is_member(g, G_Y) for g in minor_ideal_or_zero(O, t).generators):
        raise ValueError("Groebner basis does not contain I_t of the row-deleted matrix")
    cache = MinorCache(M)
    last = m - 1
    tuples = _tuples(m - 1, t - 1)
    index_pairs = [(i, j) for i in tuples for j in tuples]
    big = {ij: cache(ij[0] + (last,), ij[1] + (last,)) for ij in index_pairs}
    small = {ij: cache(*ij) for ij in index_pairs}
    checked = len(index_pairs) ** 2
    failed = 0
    reduced = 0
    witnesses = []
    for a, b in itertools.combinations(range(len(index_pairs)), 2):
        ij, kl = index_pairs[a], index_pairs[b]
        diff = big[ij] * small[kl] - big[kl] * small[ij]
        if diff.is_zero():
            continue
        reduced += 1
        if not normal_form(diff, G_Y).is_zero():
            # the swapped ordered pair fails too
            failed += 2
            witnesses.append((ij, kl))
    return CrossIdentityReport(checked, failed, reduced, witnesses)


def _check_tuple(tup, bound: int, size: int) -> tuple:
    tup = tuple(tup)
    if len(tup) != size or any(not 0 <= v < bound for v in tup):
        raise ValueError(f"index tuple {tup} is not a {size}-subset of range({bound})")
    if any(x >= y for x, y in zip(tup, tup[1:])):
        raise ValueError(f"index tuple {tup} is not strictly increasing")
    return tup


def sylvester_membership(
    M: PolyMatrix, a: int, tuples: Sequence, G: GroebnerBasis | None = None
) -> bool:
    """M_{i;j} M_{k;l} - M_{k;j} M_{i;l} lies in I_{a+1}(M)."""
    if a + 1 > min(M.nrows, M.ncols):
        raise ValueError("a + 1 exceeds the matrix size")
    if len(tuples) != 4:
        raise ValueError("expected four index tuples (i, j, k, l)")
    i, j, k, l = tuples
    i = _check_tuple(i, M.nrows, a)
    k = _check_tuple(k, M.nrows, a)
    j = _check_tuple(j, M.ncols, a)
    l = _check_tuple(l, M.ncols, a)
    cache = MinorCache(M)
    diff = cache(i, j) * cache(k, l) - cache(k, j) * cache(i, l)
    if diff.is_zero():
        return True
    if G is None:
        G = buchberger(minor_ideal(M, a + 1))
    return normal_form(diff, G).is_zero()


def sylvester_defect(M: PolyMatrix, rows: Sequence[int], k: int, cols: Sequence[int], l: int):
    """LHS - RHS of Sylvester's identity for rows i_1..i_a plus k, columns j_1..j_a plus l.

    M_{i;j} M_{i',k;j',l} - M_{i',k;j} M_{i;j',l} - M_{i';j'} M_{i,k;j,l},
    with i' = i without its last entry; minors use the listed row order.
    Zero for every matrix.
    """
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols) or not rows:
        raise ValueError("need equally many (and at least one) rows and columns")
    ip, jp = rows[:-1], cols[:-1]
    mn = lambda r, c: ordered_minor(M, r, c)  # noqa: E731
    lhs = mn(rows, cols) * mn(ip + [k], jp + [l]) - mn(ip + [k], cols) * mn(rows, jp + [l])
    rhs = mn(ip, jp) * mn(rows + [k], cols + [l])
    return lhs - rhs


# ---------------------------------------------------------------- height checks


def check_subm(O: PolyMatrix, t: int) -> SubmReport:
    """Height criteria for Y = V(I_t(O)) being generically a complete intersection."""
    if O.structure != ALMOST_SYMMETRIC:
        raise StructureError("check_subm needs an almost-symmetric matrix")
    if t < 2:
        raise ValueError("check_subm needs t >= 2")
    c = almost_symmetric_codim(O.m, t)
    ht_O = height(minor_ideal_or_zero(O, t - 1))
    ht_N = height(minor_ideal_or_zero(delete_last_column(O), t - 1))
    return SubmReport(c=c, condition2=ht_O >= c + 1, sufficient=ht_N == c + 1, ht_It1O=ht_O, ht_It1N=ht_N)


def check_subsd(M: PolyMatrix, t: int) -> SubsdReport:
    """Symmetric analogue: ht I_{t-1}(M) >= c+2 with c+1 = C(m-t+2, 2)."""
    if M.structure != SYMMETRIC:
        raise StructureError("check_subsd needs a symmetric matrix")
    if t < 2:
        raise ValueError("check_subsd needs t >= 2")
    c = symmetric_codim(M.m, t) - 1
    ht_M = height(minor_ideal_or_zero(M, t - 1))
    ht_O = height(minor_ideal_or_zero(delete_last_row(M), t - 1))
    return SubsdReport(c=c, condition2=ht_M >= c + 2, sufficient=ht_O >= c + 2, ht_It1M=ht_M, ht_It1O=ht_O)


def _congruence(M: PolyMatrix, seed: int, notes: list):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CharTwoDiagonalWarning)
        Mp, P = generic_congruence(M, seed)
    for w in caught:
        msg = str(w.message)
        if msg not in notes:
            notes.append(msg)
    return Mp, P


def check_ht1(M: PolyMatrix, t: int, seed: int = 0) -> Ht1Result:
    """Height of I_t(M) modulo I_t(O) after a generic congruence and last-row deletion.

    Draws are retried (seed, seed+1, ...) until F_{m,m} != 0 or the budget is spent.
    """
    if M.structure != SYMMETRIC:
        raise StructureError("check_ht1 needs a symmetric matrix")
    if not no_invertible_entries(M):
        raise PreconditionError("matrix has an invertible entry")
    if M.m < 2:
        raise ValueError("check_ht1 needs at least a 2x2 matrix")
    if not 1 <= t <= M.m:
        raise ValueError(f"t = {t} out of range")
    ht_M = height(minor_ideal(M, t))
    notes: list = []
    for r in range(RETRY_BUDGET):
        Mp, _ = _congruence(M, seed + r, notes)
        if Mp[M.m - 1, M.m - 1] or r == RETRY_BUDGET - 1:
            break
    fmm = bool(Mp[M.m - 1, M.m - 1])
    ht_O = height(minor_ideal_or_zero(delete_last_row(Mp), t))
    delta = ht_M - ht_O
    return Ht1Result(delta, delta <= 1, ht_M, ht_O, seed + r, r, fmm)


# ---------------------------------------------------------------- descent


def _require_descent_input(M: PolyMatrix, t: int, force_char2: bool, classify_input: bool) -> None:
    if M.ring.characteristic == 2 and not force_char2:
        raise CharTwoRefused(
            "the descent construction assumes characteristic != 2 (use force to reproduce the failure)"
        )
    if M.structure != SYMMETRIC:
        raise PreconditionError("descent needs a symmetric matrix")
    m = M.m
    if not 2 <= t <= m - 1:
        raise PreconditionError(f"descent step needs 2 <= t <= m-1, got t = {t}, m = {m}")
    if not no_invertible_entries(M):
        raise PreconditionError("matrix has an invertible entry")
    if classify_input:
        report = classify(M, t)
        if report.verdict != SYMMETRIC_VERDICT:
            raise PreconditionError(f"input is not symmetric determinantal: {report.reason}")


def descend_step(
    M: PolyMatrix,
    t: int,
    seed: int = 0,
    *,
    force_char2: bool = False,
    classify_input: bool = True,
) -> StepCertificate:
    """One elementary biliaison: X = V(I_t M) against X' = V(I_{t-1} N) on Y = V(I_t O)."""
    _require_descent_input(M, t, force_char2, classify_input)
    m = M.m
    c = almost_symmetric_codim(m, t)
    notes: list = []
    attempts = []
    for r in range(RETRY_BUDGET):
        s = seed + r
        Mp, P = _congruence(M, s, notes)
        F = Mp[m - 1, m - 1]
        O = delete_last_row(Mp)
        N = delete_last_column(O)
        I_O = minor_ideal(O, t)
        G_Y = buchberger(I_O)
        ht_O = height(I_O, G_Y)
        ht_N = height(minor_ideal(N, t - 1))
        attempt = {"seed": s, "fmm_zero": F.is_zero(), "ht_ItO": ht_O, "ht_It1N": ht_N}
        attempts.append(attempt)
        log.debug("descent attempt %s", attempt)
        if F and ht_O == c and ht_N == c + 1:
            break
    else:
        lows = [a for a in attempts if a["ht_ItO"] < c or a["ht_It1N"] < c + 1]
        if len(lows) == len(attempts):
            hts = sorted({a["ht_ItO"] for a in attempts})
            raise ChainObstruction(
                f"heights stay below the required values for every draw: "
                f"ht I_{t}(O) in {hts} (need {c}), "
                f"ht I_{t - 1}(N) in {sorted({a['ht_It1N'] for a in attempts})} (need {c + 1})",
                attempts,
            )
        raise GenericityExhausted(
            f"no draw in seeds {seed}..{seed + RETRY_BUDGET - 1} gave F_mm != 0 with the required heights",
            attempts,
        )

    ht_M = height(minor_ideal(Mp, t))
    ht_O1 = height(minor_ideal(O, t - 1))
    heights = {"ht_ItM": ht_M, "ht_ItO": ht_O, "ht_It1N": ht_N, "ht_It1O": ht_O1}
    identities = verify_cross_identities(Mp, t, G_Y)
    first = tuple(range(t - 1))
    quotient = {
        "numerator": render(ordered_minor(Mp, first + (m - 1,), first + (m - 1,))),
        "denominator": render(ordered_minor(Mp, first, first)),
        "rows": list(first),
        "cols": list(first),
    }
    return StepCertificate(
        t=t,
        M=Mp,
        O=O,
        N=N,
        P=P,
        seed_used=s,
        retries=r,
        a=F.total_degree(),
        heights=heights,
        ht1_ok=ht_M - ht_O <= 1,
        subm_condition2=ht_O1 >= c + 1,
        subm_sufficient=ht_N == c + 1,
        identities=identities,
        gb_Y=G_Y,
        quotient=quotient,
        warnings=notes,
    )


def biliaison_chain(
    M: PolyMatrix,
    t: int,
    seed: int = 0,
    *,
    force_char2: bool = False,
    classify_stages: bool = True,
) -> ChainCertificate:
    """Descend t-1 times to t = 1 and certify the terminal ideal is a complete intersection."""
    if M.structure != SYMMETRIC:
        raise PreconditionError("the chain starts from a symmetric matrix")
    if t == 1 and M.ring.characteristic == 2 and not force_char2:
        raise CharTwoRefused("the descent construction assumes characteristic != 2")
    steps = []
    current, size = M, t
    for k in range(t - 1):
        try:
            step = descend_step(
                current,
                size,
                seed + k * RETRY_BUDGET,
                force_char2=force_char2,
                classify_input=classify_stages,
            )
        except LiaisonError as exc:
            exc.step_index = k
            raise
        steps.append(step)
        current, size = step.N, size - 1
    terminal = minor_ideal(current, 1)
    G = buchberger(terminal)
    ht = height(terminal, G)
    mu = minimal_generator_count(terminal)
    cert = ChainCertificate(
        input=M,
        t=t,
        seed=seed,
        steps=steps,
        terminal_ideal=terminal,
        terminal_is_ci=mu == ht,
        terminal_mu=mu,
        terminal_height=ht,
    )
    if not cert.terminal_is_ci:
        err = ChainObstruction(f"terminal ideal is not a complete intersection (mu={mu}, ht={ht})", [])
        err.step_index = len(steps)
        raise err
    return cert


def reverify_certificate(data: dict) -> list[CrossIdentityReport]:
    """Re-check the cross identities of a certificate JSON using its embedded bases.

    Each embedded basis is accepted after an S-polynomial closure test; it is
    not recomputed from the minors.
    """
    reports = []
    for step in data["steps"]:
        M = PolyMatrix.from_json(step["M"])
        G = groebner_from_elements(M.ring, [M.ring(s) for s in step["gb_Y"]])
        reports.append(verify_cross_identities(M, step["t"], G))
    return reports
