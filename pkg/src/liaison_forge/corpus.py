"""Built-in named examples with their expected values.

Each expected value carries a provenance tag:

* ``literature`` - stated for the example in the source literature,
* ``derived``    - computed independently and frozen,
* ``trivial``    - forced by a one-line argument.

Names are written ``veronese``, ``generic_sym(3,2)`` or equivalently
``generic_sym:3:2``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from math import comb
from typing import Callable

from .groebner import IdealBasis, height, ideal_equal
from .liaison import (
    ALMOST_VERDICT,
    SYMMETRIC_VERDICT,
    CharTwoRefused,
    ChainObstruction,
    almost_symmetric_codim,
    biliaison_chain,
    check_ht1,
    check_subm,
    classify,
    no_invertible_entries,
    symmetric_codim,
)
from .pmatrix import (
    ALMOST_SYMMETRIC,
    SYMMETRIC,
    PolyMatrix,
    congruence,
    delete_last_column,
    delete_last_row,
    minor_ideal,
    minor_ideal_or_zero,
)
from .ring import QQ, Field, PolyRing, PrimeField, Polynomial

DEFAULT_PRIME = 32003
MAX_GENERIC = 4
MAX_CI = 4

LITERATURE = "literature"
DERIVED = "derived"
TRIVIAL = "trivial"


class UnknownEntry(KeyError):
    pass


@dataclass(frozen=True)
class Expected:
    value: object
    provenance: str
    note: str = ""


@dataclass
class CorpusEntry:
    name: str
    ring: PolyRing
    matrix: PolyMatrix
    t: int
    expected: dict
    source: str
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "t": self.t,
            "source": self.source,
            "matrix": self.matrix.to_json(),
            "extras": {k: v.to_json() for k, v in self.extras.items()},
            "expected": {
                k: {"value": _jsonable(e.value), "provenance": e.provenance, "note": e.note}
                for k, e in self.expected.items()
            },
        }


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    return v


@dataclass
class CheckResult:
    key: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


# ---------------------------------------------------------------- builders


def _default_field(fld: Field | None) -> Field:
    return fld if fld is not None else PrimeField(DEFAULT_PRIME)


def veronese(fld: Field | None = None) -> CorpusEntry:
    ring = PolyRing(tuple(f"x{i}" for i in range(6)), _default_field(fld))
    M = PolyMatrix(ring, [["x0", "x1", "x2"], ["x1", "x5", "x3"], ["x2", "x3", "x4"]], SYMMETRIC)
    L, D = LITERATURE, DERIVED
    return CorpusEntry(
        name="veronese",
        ring=ring,
        matrix=M,
        t=2,
        source="Veronese surface in P^5, 2x2 minors of a symmetric 3x3 matrix of indeterminates",
        expected={
            "verdict": Expected(SYMMETRIC_VERDICT, L),
            "codim": Expected(3, L, "codimension 3 = C(3,2)"),
            "mu": Expected(6, L, "minimally generated by the distinct 2x2 minors"),
            "chain_length": Expected(1, L, "t - 1 steps"),
            "a": Expected(1, TRIVIAL, "linear entries, shift = deg F_mm"),
            "step_heights": Expected((3, 2, 3), L, "heights of I_2(M), I_2(O), I_1(N)"),
            "identities_failed": Expected(0, L),
            "terminal_mu": Expected(3, D),
            "terminal_height": Expected(3, D),
            "ht1_ok": Expected(True, L),
        },
    )


def _generic_ring(m: int, fld: Field | None) -> PolyRing:
    # coordinates of P^n with n = C(m+1, 2): x0 plus one variable per entry
    names = ["x0"]
    names += [f"x{i}_{j}" for i in range(1, m + 1) for j in range(i, m + 1)]
    return PolyRing(tuple(names), _default_field(fld))


def _generic_entries(m: int) -> list:
    return [[f"x{min(i, j)}_{max(i, j)}" for j in range(1, m + 1)] for i in range(1, m + 1)]


def generic_sym(m: int, t: int, fld: Field | None = None) -> CorpusEntry:
    if not 1 <= t <= m <= MAX_GENERIC:
        raise ValueError(f"generic_sym needs 1 <= t <= m <= {MAX_GENERIC}")
    ring = _generic_ring(m, fld)
    M = PolyMatrix(ring, _generic_entries(m), SYMMETRIC)
    expected = {
        "verdict": Expected(SYMMETRIC_VERDICT, LITERATURE),
        "codim": Expected(symmetric_codim(m, t), LITERATURE, "C(m-t+2, 2)"),
    }
    if m >= 2:
        expected["ht1_ok"] = Expected(True, LITERATURE)
    if 2 <= t <= m - 1 or t == 1:
        expected["chain_length"] = Expected(t - 1, LITERATURE, "t - 1 steps")
    if t == 1:
        expected["mu"] = Expected(comb(m + 1, 2), TRIVIAL, "distinct entries")
    return CorpusEntry(
        name=f"generic_sym({m},{t})",
        ring=ring,
        matrix=M,
        t=t,
        source=f"symmetric {m}x{m} matrix of indeterminates, P^{comb(m + 1, 2)}",
        expected=expected,
    )


def generic_almost(m: int, t: int, fld: Field | None = None) -> CorpusEntry:
    if not (2 <= m <= MAX_GENERIC and 1 <= t <= m - 1):
        raise ValueError(f"generic_almost needs 2 <= m <= {MAX_GENERIC} and 1 <= t <= m-1")
    ring = _generic_ring(m, fld)
    O = PolyMatrix(ring, _generic_entries(m)[: m - 1], ALMOST_SYMMETRIC)
    return CorpusEntry(
        name=f"generic_almost({m},{t})",
        ring=ring,
        matrix=O,
        t=t,
        source=f"almost-symmetric {m - 1}x{m} matrix of indeterminates",
        expected={
            "verdict": Expected(ALMOST_VERDICT, LITERATURE),
            "codim": Expected(almost_symmetric_codim(m, t), LITERATURE, "C(m-t+2, 2) - 1"),
        },
    )


def _linear_forms(ring: PolyRing, count: int, seed: int) -> list[Polynomial]:
    rng = random.Random(seed)
    gens = ring.gens()
    out = []
    for _ in range(count):
        f = ring.zero()
        for x in gens:
            f = f + x.scale(rng.randint(-9, 9))
        out.append(f)
    return out


def _regular_forms(ring: PolyRing, count: int, seed: int) -> list[Polynomial]:
    # a random choice is regular with overwhelming probability; check by height
    for s in range(seed, seed + 100):
        forms = _linear_forms(ring, count, s)
        if all(forms) and height(IdealBasis(ring, forms)) == count:
            return forms
    raise RuntimeError("could not draw a regular sequence of linear forms")


def ci(b: int, fld: Field | None = None) -> CorpusEntry:
    if not 2 <= b <= MAX_CI:
        raise ValueError(f"ci needs 2 <= b <= {MAX_CI}")
    c = comb(b, 2)
    ring = PolyRing(tuple(f"x{i}" for i in range(c + 1)), _default_field(fld))
    forms = iter(_regular_forms(ring, c, seed=1000 + b))
    k = b - 1
    F = {}
    for i in range(k):
        for j in range(i, k):
            F[i, j] = next(forms)
    M = PolyMatrix(ring, [[F[min(i, j), max(i, j)] for j in range(k)] for i in range(k)], SYMMETRIC)
    return CorpusEntry(
        name=f"ci({b})",
        ring=ring,
        matrix=M,
        t=1,
        source=f"complete intersection of codimension C({b},2) as I_1 of a symmetric {k}x{k} matrix",
        expected={
            "verdict": Expected(SYMMETRIC_VERDICT, LITERATURE),
            "codim": Expected(c, LITERATURE, "codimension C(b,2)"),
            "mu": Expected(c, LITERATURE),
            "chain_length": Expected(0, TRIVIAL),
            "terminal_is_ci": Expected(True, TRIVIAL),
        },
    )


def ci_almost(b: int, fld: Field | None = None) -> CorpusEntry:
    if not 3 <= b <= MAX_CI:
        raise ValueError(f"ci_almost needs 3 <= b <= {MAX_CI}")
    c = comb(b, 2) - 1
    ring = PolyRing(tuple(f"x{i}" for i in range(c + 1)), _default_field(fld))
    forms = iter(_regular_forms(ring, c, seed=2000 + b))
    k = b - 2
    F = {}
    for i in range(k):
        for j in range(i, k):
            F[i, j] = next(forms)
    rows = [[F[min(i, j), max(i, j)] for j in range(k)] + [next(forms)] for i in range(k)]
    O = PolyMatrix(ring, rows, ALMOST_SYMMETRIC)
    return CorpusEntry(
        name=f"ci_almost({b})",
        ring=ring,
        matrix=O,
        t=1,
        source=f"complete intersection of codimension C({b},2)-1 as I_1 of an almost-symmetric matrix",
        expected={
            "verdict": Expected(ALMOST_VERDICT, LITERATURE),
            "codim": Expected(c, LITERATURE, "codimension C(b,2) - 1"),
            "mu": Expected(c, LITERATURE),
        },
    )


def ht_example_transform(ring: PolyRing, a: int = 1) -> PolyMatrix:
    """Symmetry-preserving congruence P with M' = P^T M P for the K[x0..x3] example."""
    return PolyMatrix(ring, [[1, 0, 0], [1, 1, 0], [a, 0, 1]])


def ht_example(fld: Field | None = None, a: int = 1) -> CorpusEntry:
    if a == 0:
        raise ValueError("the transformed matrices need a != 0")
    ring = PolyRing(("x0", "x1", "x2", "x3"), fld if fld is not None else QQ)
    M = PolyMatrix(ring, [["x0", "x1", "x2"], ["x1", "x0", "x3"], ["x2", "x3", "x2"]], SYMMETRIC)
    O = delete_last_row(M)
    N = delete_last_column(O)
    x0, x1, x2, x3 = ring.gens()
    m11 = 2 * x0 + 2 * x1 + 2 * a * x2 + 2 * a * x3 + a * a * x2
    m12 = x1 + x0 + a * x3
    m13 = x2 + x3 + a * x2
    Mp = PolyMatrix(ring, [[m11, m12, m13], [m12, x0, x3], [m13, x3, x2]], SYMMETRIC)
    Op = delete_last_row(Mp)
    Np = delete_last_column(Op)
    L, D = LITERATURE, DERIVED
    return CorpusEntry(
        name="ht_example",
        ring=ring,
        matrix=M,
        t=2,
        source="3x3 symmetric matrix over K[x0..x3] and its transform with a = %d" % a,
        extras={"O": O, "N": N, "M_prime": Mp, "O_prime": Op, "N_prime": Np, "P": ht_example_transform(ring, a)},
        expected={
            "ht_I2O": Expected(2, L, "Cohen-Macaulay of height 2"),
            "ht_I1O": Expected(4, L, "I_1(O) = (x0, x1, x2, x3)"),
            "ht_I1N": Expected(2, L, "I_1(N) = (x0, x1)"),
            "ht_I1N_prime": Expected(3, L, "height 3 for any a != 0"),
            "subm_O": Expected((2, True, False), L, "(c, condition2, sufficient)"),
            "subm_O_prime_sufficient": Expected(True, L),
            "ht1_delta": Expected(1, D, "height difference after generic congruence, seed 0"),
        },
    )


def bruns_char2() -> CorpusEntry:
    ring = PolyRing(("x", "y", "z", "w"), PrimeField(2))
    M = PolyMatrix(ring, [["0", "x", "y"], ["x", "0", "z"], ["y", "z", "0"]], SYMMETRIC)
    return CorpusEntry(
        name="bruns_char2",
        ring=ring,
        matrix=M,
        t=2,
        source="fat point (x,y,z)^2 in P^3 over a field of characteristic 2",
        expected={
            "equals_square": Expected(True, LITERATURE, "I_2(M) = (x,y,z)^2"),
            "codim": Expected(3, LITERATURE, "ht I_2(M) = 3 is maximal"),
            "verdict": Expected(SYMMETRIC_VERDICT, LITERATURE),
            "chain": Expected("CharTwoRefused", TRIVIAL, "characteristic 2 is refused"),
            "forced_chain": Expected("ChainObstruction", LITERATURE),
            "forced_ht_I2O": Expected((1,), LITERATURE, "ht I_2(O) = 1 for every draw"),
        },
    )


# ---------------------------------------------------------------- registry

_BUILDERS: dict[str, Callable] = {
    "veronese": veronese,
    "generic_sym": generic_sym,
    "generic_almost": generic_almost,
    "ci": ci,
    "ci_almost": ci_almost,
    "ht_example": ht_example,
    "bruns_char2": bruns_char2,
}

_NAME = re.compile(r"^(?P<base>[a-z_0-9]+?)(?:\((?P<paren>[\d,\s]*)\)|(?P<colon>(?::\d+)+))?$")


def parse_name(name: str) -> tuple[str, tuple[int, ...]]:
    match = _NAME.match(name.strip())
    if not match or match.group("base") not in _BUILDERS:
        raise UnknownEntry(name)
    raw = match.group("paren") or (match.group("colon") or "").replace(":", ",").lstrip(",")
    args = tuple(int(v) for v in raw.split(",") if v.strip())
    return match.group("base"), args


def builtin(name: str, fld: Field | None = None) -> CorpusEntry:
    base, args = parse_name(name)
    builder = _BUILDERS[base]
    if base == "bruns_char2":
        if args or fld is not None:
            raise ValueError("bruns_char2 takes no parameters and is pinned to characteristic 2")
        return builder()
    try:
        return builder(*args, fld=fld)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {base}: {args}") from exc


def names() -> list[str]:
    out = ["veronese"]
    out += [f"generic_sym({m},{t})" for m in range(1, MAX_GENERIC + 1) for t in range(1, m + 1)]
    out += [f"generic_almost({m},{t})" for m in range(2, MAX_GENERIC + 1) for t in range(1, m)]
    out += [f"ci({b})" for b in range(2, MAX_CI + 1)]
    out += [f"ci_almost({b})" for b in range(3, MAX_CI + 1)]
    out += ["ht_example", "bruns_char2"]
    return out


def entries(pattern: str | None = None) -> list[CorpusEntry]:
    return [builtin(n) for n in names() if pattern is None or pattern in n]


# ---------------------------------------------------------------- checking


def _ht(M: PolyMatrix, t: int) -> int:
    return height(minor_ideal_or_zero(M, t))


def evaluate(entry: CorpusEntry, seed: int = 0) -> list[CheckResult]:
    """Recompute every expected value of ``entry`` with the live modules."""
    exp = entry.expected
    actual: dict = {}
    M, t = entry.matrix, entry.t

    if {"verdict", "codim", "mu"} & exp.keys():
        report = classify(M, t)
        actual["verdict"] = report.verdict
        actual["codim"] = report.actual_codim
        actual["mu"] = report.mu

    if "ht1_ok" in exp:
        if M.ring.characteristic != 2 and no_invertible_entries(M):
            actual["ht1_ok"] = check_ht1(M, t, seed).ok
        else:
            actual["ht1_ok"] = None

    chain_keys = {"chain_length", "a", "step_heights", "identities_failed", "terminal_mu", "terminal_height", "terminal_is_ci"}
    if chain_keys & exp.keys():
        cert = biliaison_chain(M, t, seed)
        actual["chain_length"] = len(cert.steps)
        actual["terminal_mu"] = cert.terminal_mu
        actual["terminal_height"] = cert.terminal_height
        actual["terminal_is_ci"] = cert.terminal_is_ci
        actual["identities_failed"] = sum(s.identities_failed for s in cert.steps)
        if cert.steps:
            first = cert.steps[0]
            actual["a"] = first.a
            h = first.heights
            actual["step_heights"] = (h["ht_ItM"], h["ht_ItO"], h["ht_It1N"])

    if entry.name == "ht_example":
        x = entry.extras
        actual["ht_I2O"] = _ht(x["O"], 2)
        actual["ht_I1O"] = _ht(x["O"], 1)
        actual["ht_I1N"] = _ht(x["N"], 1)
        actual["ht_I1N_prime"] = _ht(x["N_prime"], 1)
        rep = check_subm(x["O"], 2)
        actual["subm_O"] = (rep.c, rep.condition2, rep.sufficient)
        actual["subm_O_prime_sufficient"] = check_subm(x["O_prime"], 2).sufficient
        actual["ht1_delta"] = check_ht1(M, t, seed).delta

    if entry.name == "bruns_char2":
        ring = entry.ring
        x, y, z, _ = ring.gens()
        square = IdealBasis(ring, [x * x, x * y, x * z, y * y, y * z, z * z])
        actual["equals_square"] = ideal_equal(minor_ideal(M, 2), square)
        actual["chain"] = _outcome(lambda: biliaison_chain(M, t, seed))
        try:
            biliaison_chain(M, t, seed, force_char2=True)
            actual["forced_chain"] = "completed"
        except ChainObstruction as exc:
            actual["forced_chain"] = "ChainObstruction"
            actual["forced_ht_I2O"] = tuple(sorted({a["ht_ItO"] for a in exc.attempts}))

    return [CheckResult(k, e.value, actual.get(k)) for k, e in exp.items()]


def _outcome(fn) -> str:
    try:
        fn()
    except CharTwoRefused:
        return "CharTwoRefused"
    except ChainObstruction:
        return "ChainObstruction"
    return "completed"


def transformed_ht_example(a: int = 1) -> PolyMatrix:
    """P^T M P for the K[x0..x3] example, to compare with the literal transform."""
    entry = ht_example(a=a)
    return congruence(entry.matrix, entry.extras["P"])
