"""Class polynomials of the orders Z[sqrt(-N)] and the ramified-prime test.

H_{-4N} is the minimal polynomial of j(Z[sqrt(-N)]), built by evaluating j
at the CM point of every reduced form with enough working precision that
each coefficient rounds to an integer with residual < 0.25.  Its factor
structure mod p drives the membership test for the set of primes over
which the twisted curve keeps a fixed rational point.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import mpmath as mp

from .arith import (
    FpPoly,
    TooLarge,
    factor_squarefree,
    fp_root_count,
    fp_splits_completely,
    is_probable_prime,
    kronecker,
)
from .quadforms import class_group, genus_characters

DEFAULT_N_BOUND = 2000


class PrecisionExhausted(ArithmeticError):
    """Coefficients failed the integrality margin at maximum precision."""


class RamifiedInM(ValueError):
    """The test prime ramifies in Q(sqrt(-N))."""


@dataclass(frozen=True)
class ClassPolynomial:
    D: int
    coeffs: tuple[int, ...]  # ascending, monic
    disc_poly: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def mod_p(self, p: int) -> FpPoly:
        return FpPoly.make(p, self.coeffs)

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def j_from_tau(tau: mp.mpc) -> mp.mpc:
    """j(tau) via E4^3 / Delta at the current working precision."""
    q = mp.exp(2j * mp.pi * tau)
    eps = mp.mpf(2) ** (-(mp.mp.prec + 16))
    e4 = mp.mpf(1)
    n = 1
    while True:
        qn = q**n
        term = 240 * n**3 * qn / (1 - qn)
        e4 += term
        if abs(term) < eps:
            break
        n += 1
    eta24 = mp.mpf(1)
    n = 1
    while True:
        qn = q**n
        eta24 *= (1 - qn) ** 24
        if abs(qn) < eps:
            break
        n += 1
    return e4**3 / (q * eta24)


def j_from_theta(tau: mp.mpc) -> mp.mpc:
    """j(tau) through the modular lambda function; independent of j_from_tau."""
    q2 = mp.exp(1j * mp.pi * tau)
    eps = mp.mpf(2) ** (-(mp.mp.prec + 16))
    th2 = mp.mpf(0)
    th3 = mp.mpf(1)
    n = 0
    while True:
        t2 = 2 * q2 ** ((n + mp.mpf(1) / 2) ** 2)
        t3 = 2 * q2 ** ((n + 1) ** 2)
        th2 += t2
        th3 += t3
        if abs(t2) < eps and abs(t3) < eps:
            break
        n += 1
    lam = th2**4 / th3**4
    return 256 * (1 - lam + lam**2) ** 3 / (lam**2 * (1 - lam) ** 2)


def _int_poly_disc(coeffs: tuple[int, ...]) -> int:
    """Discriminant of a monic integer polynomial via subresultant PRS."""
    n = len(coeffs) - 1
    if n == 1:
        return 1
    f = list(coeffs)
    fp = [i * c for i, c in enumerate(coeffs)][1:]
    res = _int_resultant(f, fp)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res


def _int_resultant(f: list[int], g: list[int]) -> int:
    """Resultant of integer polynomials by the subresultant algorithm."""

    def deg(h):
        return len(h) - 1

    def prem(a, b):
        # pseudo-remainder of a by b
        a = a[:]
        d = deg(a) - deg(b)
        lb = b[-1]
        for _ in range(d + 1):
            if deg(a) < deg(b):
                a = [c * lb for c in a]
                continue
            la = a[-1]
            shift = deg(a) - deg(b)
            a = [c * lb for c in a]
            for i, bc in enumerate(b):
                a[shift + i] -= la * bc
            while len(a) > 1 and a[-1] == 0:
                a.pop()
            if a == [0] or (len(a) == 1 and a[0] == 0):
                return [0]
        return a

    A, B = f[:], g[:]
    s = 1
    gco = 1
    h = 1
    while True:
        dA, dB = deg(A), deg(B)
        delta = dA - dB
        if dA % 2 == 1 and dB % 2 == 1:
            s = -s
        R = prem(A, B)
        if R == [0]:
            return 0
        A = B
        denom = gco * h**delta
        B = [c // denom for c in R]
        gco = A[-1]
        h = h ** (1 - delta) * gco**delta if delta <= 1 else gco**delta // h ** (delta - 1)
        if deg(B) == 0:
            dA = deg(A)
            res = h ** (1 - dA) * B[0] ** dA if dA <= 1 else B[0] ** dA // h ** (dA - 1)
            return s * res


def _precision_for(N: int, forms) -> int:
    total = sum(mp.mpf(1) / f.a for f in forms)
    bits = mp.pi * mp.sqrt(4 * N) * total / mp.log(2)
    return int(bits) + 64


def _compute_class_polynomial(N: int, extra_bits: int = 0) -> ClassPolynomial:
    cg = class_group(N)
    forms = cg.reps
    prec = _precision_for(N, forms) + extra_bits
    with mp.workprec(prec):
        root_n = mp.sqrt(N)
        js = []
        for f in forms:
            tau = (-f.b + 2j * root_n) / (2 * f.a)
            js.append(j_from_tau(tau))
        poly = [mp.mpc(1)]
        for j in js:
            nxt = [mp.mpc(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i] -= c * j
                nxt[i + 1] += c
            poly = nxt
        ints = []
        for c in poly:
            r = mp.nint(mp.re(c))
            if abs(mp.re(c) - r) >= 0.25 or abs(mp.im(c)) >= 0.25:
                raise PrecisionExhausted(
                    f"coefficient of H_{-4 * N} failed integrality at {prec} bits"
                )
            ints.append(int(r))
    assert ints[-1] == 1
    coeffs = tuple(ints)
    return ClassPolynomial(D=-4 * N, coeffs=coeffs, disc_poly=_int_poly_disc(coeffs))


_MEMORY_CACHE: dict[int, ClassPolynomial] = {}


def _cache_payload(cp: ClassPolynomial) -> str:
    lines = [f"D {cp.D}", f"h {cp.degree}"]
    lines += [f"coeff {c}" for c in cp.coeffs]
    return "\n".join(lines)


def _cache_path(cache_dir: str, D: int) -> str:
    return os.path.join(cache_dir, f"classpoly_{-D}.txt")


def cache_put(cache_dir: str, cp: ClassPolynomial) -> None:
    """Atomically write one class polynomial; bit-exact round trip."""
    os.makedirs(cache_dir, exist_ok=True)
    payload = _cache_payload(cp)
    digest = hashlib.sha256(payload.encode()).hexdigest()
    body = f"twistlocal-classpoly v1\n{payload}\nchecksum {digest}\n"
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".classpoly-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(body)
        os.replace(tmp, _cache_path(cache_dir, cp.D))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_get(cache_dir: str, D: int) -> Optional[ClassPolynomial]:
    """Load H_D from disk; any corruption reads as a miss."""
    path = _cache_path(cache_dir, D)
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError:
        return None
    try:
        if lines[0] != "twistlocal-classpoly v1" or not lines[-1].startswith("checksum "):
            return None
        payload = "\n".join(lines[1:-1])
        digest = lines[-1].split()[1]
        if hashlib.sha256(payload.encode()).hexdigest() != digest:
            return None
        fields = dict(line.split(maxsplit=1) for line in lines[1:2])
        if int(fields["D"]) != D:
            return None
        coeffs = tuple(int(line.split()[1]) for line in lines[3:-1])
        h = int(lines[2].split()[1])
        if len(coeffs) != h + 1 or coeffs[-1] != 1:
            return None
        return ClassPolynomial(D=D, coeffs=coeffs, disc_poly=_int_poly_disc(coeffs))
    except (ValueError, KeyError, IndexError):
        return None


def class_polynomial(
    N: int, cache_dir: Optional[str] = None, bound: int = DEFAULT_N_BOUND
) -> ClassPolynomial:
    """H_{-4N}, monic with exact integer coefficients, degree h(-4N).

    Results are memoized per process; with `cache_dir` set they are also
    persisted (and reloaded) in a checksummed text format.
    """
    if N < 2:
        raise ValueError("N must be a squarefree integer >= 2")
    if N > bound:
        raise TooLarge(f"N = {N} exceeds class polynomial bound {bound}")
    factor_squarefree(N)
    D = -4 * N
    if D in _MEMORY_CACHE:
        return _MEMORY_CACHE[D]
    if cache_dir is not None:
        cp = cache_get(cache_dir, D)
        if cp is not None and cp.degree == class_group(N).h:
            _MEMORY_CACHE[D] = cp
            return cp
    extra = 0
    while True:
        try:
            cp = _compute_class_polynomial(N, extra_bits=extra)
            break
        except PrecisionExhausted:
            if extra >= 4096:
                raise
            extra = max(128, extra * 2)
    _MEMORY_CACHE[D] = cp
    if cache_dir is not None:
        cache_put(cache_dir, cp)
    return cp


def _splitting_in_M(N: int, p: int) -> int:
    """+1 / -1 for p split / inert in Q(sqrt(-N)); raises when ramified."""
    d_field = -N if (-N) % 4 == 1 else -4 * N
    if p == 2:
        if d_field % 2 == 0:
            raise RamifiedInM(f"2 ramifies in Q(sqrt({-N}))")
        return 1 if d_field % 8 == 1 else -1
    if d_field % p == 0:
        raise RamifiedInM(f"{p} ramifies in Q(sqrt({-N}))")
    return kronecker(d_field, p)


def _represented_by_principal(N: int, p: int) -> bool:
    """Is p = x^2 + N y^2 solvable?  Exact test, only sensible for odd p."""
    y = 0
    while N * y * y <= p:
        r = p - N * y * y
        s = int(r**0.5)
        for x in (s - 1, s, s + 1):
            if x >= 0 and x * x == r:
                return True
        y += 1
    return False


def _represented_by_maximal_principal(N: int, p: int) -> bool:
    """Is p = x^2 + xy + ((N+1)/4) y^2 solvable?  (N = 3 mod 4.)

    Equivalent to p splitting completely in the Hilbert class field of
    Q(sqrt(-N)); valid for every prime unramified there, including 2.
    """
    assert N % 4 == 3
    y = 0
    while N * y * y <= 4 * p:
        disc = 4 * p - N * y * y
        s = math.isqrt(disc)
        if s * s == disc and (s - y) % 2 == 0:
            return True
        y += 1
    return False


def in_S_N_by_root_test(N: int, p: int, cache_dir: Optional[str] = None) -> Optional[bool]:
    """Membership test read off the factorization of H_{-4N} mod p.

    For p inert in M = Q(sqrt(-N)): True iff H has a root in F_p.  For p
    split: True iff H splits into distinct linear factors.  None when p
    divides disc(H), where the factorization may not reflect the
    splitting of p in Q(j).
    """
    split = _splitting_in_M(N, p)
    H = class_polynomial(N, cache_dir=cache_dir)
    if H.disc_poly % p == 0:
        return None
    Hp = H.mod_p(p)
    if split == 1:
        return fp_splits_completely(Hp)
    return fp_root_count(Hp) >= 1


def in_S_N(N: int, p: int, cache_dir: Optional[str] = None) -> Optional[bool]:
    """Does the mod-p fiber keep a rational point fixed by the main involution?

    A fixed point of the level-N involution is a CM point for some order
    of M = Q(sqrt(-N)) containing sqrt(-N): the maximal order when
    N = 3 mod 4, else Z[sqrt(-N)] itself.  Membership is decided by
    whichever equivalent formulation stays exact:

    * p inert in M: some prime of the real CM field Q(j) over p has
      residue degree 1 iff the Frobenius at p restricts to complex
      conjugation on the genus field, i.e. every genus generator m
      satisfies (m | p) = sign(m).  Pure Kronecker symbols; the criterion
      is the same for both orders.
    * p split in M, N = 1 or 2 mod 4: complete splitting of H_{-4N}
      mod p; when p collides with disc(H) fall back to the exact
      representation test p = x^2 + N y^2.
    * p split in M, N = 3 mod 4 (this includes p = 2): representation by
      the maximal order's principal form, p = x^2 + xy + (N+1)/4 y^2,
      which is total splitting in the Hilbert class field.  For N = 7
      mod 8 this agrees with the factorization of H_{-4N} mod p (the two
      ring class fields coincide); for N = 3 mod 8 the order test is
      strictly smaller and would miss fixed points with maximal CM.
    """
    if not is_probable_prime(p):
        raise ValueError(f"p = {p} is not prime")
    split = _splitting_in_M(N, p)  # raises RamifiedInM when p | disc
    if split == -1:
        return all(kronecker(m, p) == (1 if m > 0 else -1) for m in genus_characters(N))
    if N % 4 == 3:
        return _represented_by_maximal_principal(N, p)
    H = class_polynomial(N, cache_dir=cache_dir)
    if H.disc_poly % p == 0:
        return _represented_by_principal(N, p)
    return fp_splits_completely(H.mod_p(p))


__all__ = [
    "ClassPolynomial",
    "DEFAULT_N_BOUND",
    "PrecisionExhausted",
    "RamifiedInM",
    "cache_get",
    "cache_put",
    "class_polynomial",
    "in_S_N",
    "in_S_N_by_root_test",
    "j_from_tau",
    "j_from_theta",
]
