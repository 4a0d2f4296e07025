"""Local solvability of the quadratic twist of X_0(N) by Q(sqrt(d)).

`decide_local` walks a complete decision tree over (N, d, p): the real
place and split primes are always solvable; inert primes split into the
three congruence cases depending on whether and how they divide N; primes
ramified in Q(sqrt(d)) but not in Q(sqrt(-N)) reduce to the fixed-point
set membership test of `classpoly.in_S_N`.  Primes ramified in both
quadratic fields are outside the theorem and come back Undetermined,
except when the class number is 1 and a rational fixed point settles
every place at once.

`everywhere_local` turns that into a finite procedure by evaluating the
critical set only; `search_d`, `quer_obstruction`, `conic_expected` and
`clark_expected` are report generators and independent cross-validators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional

from .arith import (
    Infinity,
    PrimeSplitting,
    SquarefreeInt,
    factor_squarefree,
    field_disc,
    hilbert_global,
    hilbert_local,
    hilbert_support,
    is_probable_prime,
    kronecker,
    primes_up_to,
    splitting_type,
)
from .classpoly import in_S_N
from .quadforms import class_group


class NotCoprime(ValueError):
    """The engine requires gcd(N, d) = 1."""


class UnsupportedLevel(ValueError):
    """Level outside the genus-zero table."""


class HypothesisViolated(ValueError):
    """Inputs break the stated hypotheses of a corollary."""


class Status(Enum):
    SOLVABLE = "solvable"
    EMPTY = "empty"
    UNDETERMINED = "undetermined"


class Case(Enum):
    REAL_PLACE = "real_place"
    SPLIT_PRIME = "split_prime"
    INERT_NOT_DIVIDING = "inert_not_dividing"
    INERT_DIVIDING_ODD = "inert_dividing_odd"
    INERT_DIVIDING_TWO = "inert_dividing_two"
    RAMIFIED_SN = "ramified_sn"
    DOUBLY_RAMIFIED = "doubly_ramified"


@dataclass(frozen=True)
class Verdict:
    status: Status
    case: Case
    reason: str
    code: Optional[str] = None  # machine-readable tag, set when undetermined

    @property
    def solvable(self) -> Optional[bool]:
        if self.status is Status.UNDETERMINED:
            return None
        return self.status is Status.SOLVABLE


def _validate_pair(N: int, d: int) -> tuple[SquarefreeInt, SquarefreeInt]:
    if N < 2:
        raise ValueError("N must be a squarefree integer >= 2")
    if d in (0, 1):
        raise ValueError("d must be a squarefree integer != 0, 1")
    sN = factor_squarefree(N)
    sd = factor_squarefree(d)
    if math.gcd(N, d) != 1:
        raise NotCoprime(f"gcd({N}, {d}) > 1")
    return sN, sd


def _ramified_in_m(N: int, p: int) -> bool:
    dm = -N if (-N) % 4 == 1 else -4 * N
    return dm % p == 0


@lru_cache(maxsize=None)
def _class_number(N: int) -> int:
    return class_group(N).h


def decide_local(N: int, d: int, p, cache_dir: Optional[str] = None) -> Verdict:
    """Verdict for the p-adic (or real, p=Infinity) points of the twist."""
    _validate_pair(N, d)
    if p == Infinity:
        return Verdict(Status.SOLVABLE, Case.REAL_PLACE, "real points always exist")
    p = int(p)
    if not is_probable_prime(p):
        raise ValueError(f"p = {p} is not prime")

    sp = splitting_type(d, p)
    if sp is PrimeSplitting.SPLIT:
        return Verdict(Status.SOLVABLE, Case.SPLIT_PRIME, f"{p} splits in Q(sqrt({d}))")

    if sp is PrimeSplitting.INERT:
        if N % p != 0:
            return Verdict(
                Status.SOLVABLE,
                Case.INERT_NOT_DIVIDING,
                f"{p} inert in Q(sqrt({d})) and prime to {N}",
            )
        cof = N // p
        odd_q = [q for q in factor_squarefree(cof).primes if q % 2 == 1]
        if p != 2:
            ok = p % 4 == 3 and all(q % 4 == 1 for q in odd_q)
            if ok:
                return Verdict(
                    Status.SOLVABLE,
                    Case.INERT_DIVIDING_ODD,
                    f"{p} = 3 mod 4 and every odd prime in {N}/{p} is 1 mod 4",
                )
            why = (
                f"{p} = {p % 4} mod 4" if p % 4 != 3 else f"some odd prime of {N}/{p} is 3 mod 4"
            )
            return Verdict(Status.EMPTY, Case.INERT_DIVIDING_ODD, why)
        ok = all(q % 4 == 1 for q in odd_q)
        if ok:
            return Verdict(
                Status.SOLVABLE,
                Case.INERT_DIVIDING_TWO,
                f"every odd prime of {N}/2 is 1 mod 4",
            )
        return Verdict(Status.EMPTY, Case.INERT_DIVIDING_TWO, f"some odd prime of {N}/2 is 3 mod 4")

    # p ramified in K
    if _ramified_in_m(N, p):
        if _class_number(N) == 1:
            return Verdict(
                Status.SOLVABLE,
                Case.DOUBLY_RAMIFIED,
                f"h(-4*{N}) = 1: the principal fixed point is rational, so all places are solvable",
            )
        return Verdict(
            Status.UNDETERMINED,
            Case.DOUBLY_RAMIFIED,
            f"{p} ramifies in both Q(sqrt({d})) and Q(sqrt({-N})); outside the decision theorem",
            code="doubly_ramified",
        )
    member = in_S_N(N, p, cache_dir=cache_dir)
    if member is None:
        return Verdict(
            Status.UNDETERMINED,
            Case.RAMIFIED_SN,
            f"2 collides with disc H_{-4 * N}; fixed-point set membership undetermined",
            code="disc_collision",
        )
    if member:
        return Verdict(
            Status.SOLVABLE, Case.RAMIFIED_SN, f"{p} lies in the fixed-point prime set of level {N}"
        )
    return Verdict(
        Status.EMPTY, Case.RAMIFIED_SN, f"{p} is outside the fixed-point prime set of level {N}"
    )


@dataclass
class GlobalReport:
    N: int
    d: int
    per_place: dict
    everywhere_local: Optional[bool]

    @property
    def failing_places(self) -> list:
        return [v for v in self.per_place if self.per_place[v].status is Status.EMPTY]

    @property
    def undetermined_places(self) -> list:
        return [v for v in self.per_place if self.per_place[v].status is Status.UNDETERMINED]


def critical_places(N: int, d: int) -> list:
    """Places not already settled by the split / inert-coprime cases."""
    places = {Infinity}
    places.update(factor_squarefree(d).primes)
    if d % 4 != 1:
        places.add(2)
    for q in factor_squarefree(N).primes:
        if splitting_type(d, q) is PrimeSplitting.INERT:
            places.add(q)
    finite = sorted(p for p in places if p != Infinity)
    return [Infinity] + finite


def everywhere_local(N: int, d: int, cache_dir: Optional[str] = None) -> GlobalReport:
    """Evaluate the finite critical set; True means solvable at every place."""
    _validate_pair(N, d)
    per = {}
    for v in critical_places(N, d):
        per[v] = decide_local(N, d, v, cache_dir=cache_dir)
    statuses = {verdict.status for verdict in per.values()}
    if statuses == {Status.SOLVABLE}:
        overall: Optional[bool] = True
    elif Status.EMPTY in statuses:
        overall = False
    else:
        overall = None
    return GlobalReport(N=N, d=d, per_place=per, everywhere_local=overall)


def _squarefree_candidates(dmin: int, dmax: int, N: int, primes_only: bool) -> list[int]:
    out = []
    for d in range(dmin, dmax + 1):
        if d in (0, 1) or math.gcd(abs(d), N) != 1:
            continue
        a = abs(d)
        if primes_only and not is_probable_prime(a):
            continue
        try:
            factor_squarefree(d)
        except Exception:
            continue
        out.append(d)
    return sorted(out, key=lambda d: (abs(d), d))


def search_d(
    N: int,
    dmin: int,
    dmax: int,
    primes_only: bool = False,
    cache_dir: Optional[str] = None,
) -> list[tuple[int, GlobalReport]]:
    """All twists by squarefree d in [dmin, dmax] solvable at every place.

    Output is ordered by |d| with the negative sign first.
    """
    results = []
    for d in _squarefree_candidates(dmin, dmax, N, primes_only):
        report = everywhere_local(N, d, cache_dir=cache_dir)
        if report.everywhere_local is True:
            results.append((d, report))
    return results


@dataclass(frozen=True)
class QuerWitness:
    N1: int
    place: int
    local_symbol: int = -1


def quer_obstruction(N: int, d: int) -> Optional[QuerWitness]:
    """A divisor of N that must be a norm from Q(sqrt(d)) but is not.

    Scans divisors N1 = 1 mod 4, and even N1 with N/N1 = 3 mod 4.  When
    the global symbol (N1, d) is -1 the witness place returned is the
    smallest odd prime with negative local symbol (one always exists,
    because the real symbol is +1 and the local signs multiply to +1).
    """
    sN, _ = _validate_pair(N, d)
    divisors = [1]
    for q in sN.primes:
        divisors += [t * q for t in divisors]
    for N1 in sorted(divisors):
        if N1 == 1:
            continue
        ok = N1 % 4 == 1 or (N1 % 2 == 0 and (N // N1) % 4 == 3)
        if not ok:
            continue
        if hilbert_global(N1, d) == -1:
            for v in hilbert_support(N1, d):
                if v == Infinity or v == 2:
                    continue
                if hilbert_local(N1, d, v) == -1:
                    return QuerWitness(N1=N1, place=int(v))
            raise ArithmeticError("negative global symbol without an odd negative place")
    return None


_CONIC_LEVELS = {2, 3, 5, 6, 7, 10, 13}
_CONIC_RESIDUE_MOD = {5: 5, 10: 5, 13: 13}


def conic_expected(N: int, d: int) -> bool:
    """Genus-zero table: does the twist have (infinitely many) rational points?"""
    if N not in _CONIC_LEVELS:
        raise UnsupportedLevel(f"N = {N} is not in the genus-zero table")
    if d in (0, 1):
        raise ValueError("d must be squarefree != 0, 1")
    factor_squarefree(d)
    if N in (2, 3, 7):
        return True
    for m in (d, d // N if d % N == 0 else None):
        if m is None:
            continue
        if N in (5, 10, 13):
            mod = _CONIC_RESIDUE_MOD[N]
            if all(kronecker(q, mod) == 1 for q in factor_squarefree(m).primes):
                return True
        else:  # N = 6: 2 must be a square modulo every prime divisor of m
            if all(kronecker(2, q) == 1 for q in factor_squarefree(m).primes if q % 2 == 1) and m % 2 != 0:
                return True
    return False


@dataclass(frozen=True)
class ClarkExpectation:
    N: int
    p: int
    d: int

    def expected_at(self, ell) -> Status:
        if ell == self.N or ell == self.p:
            return Status.EMPTY
        return Status.SOLVABLE


def clark_expected(N: int, p: int) -> ClarkExpectation:
    """Twist by p* = (-1)^((p-1)/2) p: empty exactly at N and p.

    Requires N prime = 1 mod 4, p an odd prime with (N | p) = -1.
    """
    if not (is_probable_prime(N) and N % 4 == 1):
        raise HypothesisViolated(f"N = {N} must be a prime = 1 mod 4")
    if not (is_probable_prime(p) and p % 2 == 1 and p != N):
        raise HypothesisViolated(f"p = {p} must be an odd prime different from N")
    if kronecker(N, p) != -1:
        raise HypothesisViolated(f"(N|p) = ({N}|{p}) must be -1")
    d = p if p % 4 == 1 else -p
    return ClarkExpectation(N=N, p=p, d=d)


__all__ = [
    "Case",
    "ClarkExpectation",
    "GlobalReport",
    "HypothesisViolated",
    "NotCoprime",
    "QuerWitness",
    "Status",
    "UnsupportedLevel",
    "Verdict",
    "clark_expected",
    "conic_expected",
    "critical_places",
    "decide_local",
    "everywhere_local",
    "quer_obstruction",
    "search_d",
]
