"""Exact integer and mod-p primitives shared by every other module.

Everything here is pure: factorization with a hard size gate, the full
Kronecker symbol, local and global Hilbert symbols, prime splitting in a
quadratic field, and a small dense polynomial type over F_p.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class NotSquarefree(ValueError):
    """Input has a repeated prime factor."""


class TooLarge(ValueError):
    """Input exceeds a configured work bound."""


Infinity = math.inf

# Miller-Rabin with this witness set is deterministic below 3.3 * 10^24,
# far beyond the factorization gate; above that it is probabilistic.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10**6
DEFAULT_FACTOR_BOUND = 10**18


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """One nontrivial factor of composite odd n."""
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> dict[int, int]:
    """Prime factorization of |n| as {prime: exponent}.

    Trial division up to 10^6, then Pollard-Brent rho.  Raises TooLarge
    instead of grinding when |n| exceeds `bound`.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    if n > bound:
        raise TooLarge(f"|n| = {n} exceeds factorization bound {bound}")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n and d < _TRIAL_LIMIT:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += wheel[i]
        i = (i + 1) % 8
    if n == 1:
        return out
    rng = random.Random(0xC0FFEE ^ n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        g = _pollard_brent(m, rng)
        stack.append(g)
        stack.append(m // g)
    return out


@dataclass(frozen=True)
class SquarefreeInt:
    """A nonzero squarefree integer together with its factorization.

    `primes` is sorted ascending and every exponent is 1; the product of
    the primes times `sign` recovers `value`.
    """

    value: int
    sign: int
    primes: tuple[int, ...]

    @property
    def factors(self) -> tuple[tuple[int, int], ...]:
        return tuple((p, 1) for p in self.primes)

    def __int__(self) -> int:
        return self.value


def factor_squarefree(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> SquarefreeInt:
    """Factor n, insisting that it is squarefree.

    Raises NotSquarefree on a repeated prime and TooLarge past the bound.
    """
    if n == 0:
        raise ValueError("0 is not squarefree")
    fac = factor(n, bound=bound)
    for p, e in fac.items():
        if e > 1:
            raise NotSquarefree(f"{n} is divisible by {p}^2")
    return SquarefreeInt(value=n, sign=1 if n > 0 else -1, primes=tuple(sorted(fac)))


def squarefree_part(n: int, bound: int = DEFAULT_FACTOR_BOUND) -> int:
    """The squarefree kernel of n (same sign)."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    out = 1 if n > 0 else -1
    for p, e in factor(n, bound=bound).items():
        if e % 2:
            out *= p
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a | n), fully extended to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = (n & -n).bit_length() - 1
        n >>= e
        if e % 2 == 1 and a % 8 in (3, 5):
            res = -res
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def _unit_and_val(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return a, v


def hilbert_local(a: int, b: int, v) -> int:
    """Local Hilbert symbol (a, b)_v for v an odd prime, 2, or Infinity.

    At the real place the symbol is +1 iff a or b is positive.  At a
    finite place it is the standard unit-part formula in terms of the
    Legendre symbol (odd p) or the mod-8 characters (p = 2).
    """
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if v == Infinity:
        return 1 if (a > 0 or b > 0) else -1
    p = int(v)
    if p < 2 or not is_probable_prime(p):
        raise ValueError(f"{v} is not a prime or Infinity")
    u, alpha = _unit_and_val(a, p)
    w, beta = _unit_and_val(b, p)
    if p != 2:
        eps = ((p - 1) // 2) % 2
        sign = -1 if (alpha * beta * eps) % 2 else 1
        if beta % 2:
            sign *= kronecker(u % p, p)
        if alpha % 2:
            sign *= kronecker(w % p, p)
        return sign
    e_u = ((u - 1) // 2) % 2
    e_w = ((w - 1) // 2) % 2
    w_u = ((u * u - 1) // 8) % 2
    w_w = ((w * w - 1) // 8) % 2
    return -1 if (e_u * e_w + alpha * w_w + beta * w_u) % 2 else 1


def hilbert_support(a: int, b: int) -> list:
    """Places where (a, b)_v can be nontrivial: Infinity, 2, and p | ab."""
    places = {2}
    places.update(factor(a))
    places.update(factor(b))
    return [Infinity] + sorted(places)


def hilbert_global(a: int, b: int) -> int:
    """+1 iff (a, b)_v = +1 at every place, i.e. b is a norm from Q(sqrt(a))."""
    for v in hilbert_support(a, b):
        if hilbert_local(a, b, v) == -1:
            return -1
    return 1


class PrimeSplitting(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def field_disc(d: int) -> int:
    """Discriminant of Q(sqrt(d)) for squarefree d != 0, 1."""
    if d in (0, 1):
        raise ValueError("d must define a genuine quadratic field")
    return d if d % 4 == 1 else 4 * d


def splitting_type(d, p: int) -> PrimeSplitting:
    """How the rational prime p decomposes in Q(sqrt(d)), d squarefree != 1."""
    d = int(d)
    disc = field_disc(d)
    if p == 2:
        if disc % 2 == 0:
            return PrimeSplitting.RAMIFIED
        return PrimeSplitting.SPLIT if disc % 8 == 1 else PrimeSplitting.INERT
    if disc % p == 0:
        return PrimeSplitting.RAMIFIED
    return PrimeSplitting.SPLIT if kronecker(disc, p) == 1 else PrimeSplitting.INERT


# ---------------------------------------------------------------------------
# Dense polynomials over F_p.  Zero is the empty tuple; coefficients are
# ascending and reduced into [0, p); the leading coefficient is nonzero.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FpPoly:
    p: int
    coeffs: tuple[int, ...]

    @staticmethod
    def make(p: int, coeffs) -> "FpPoly":
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return FpPoly(p, tuple(cs))

    @staticmethod
    def x(p: int) -> "FpPoly":
        return FpPoly(p, (0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def __add__(self, other: "FpPoly") -> "FpPoly":
        p = self.p
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return FpPoly.make(p, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __sub__(self, other: "FpPoly") -> "FpPoly":
        p = self.p
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return FpPoly.make(p, [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])

    def __mul__(self, other: "FpPoly") -> "FpPoly":
        p = self.p
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return FpPoly(p, ())
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj) % p
        return FpPoly.make(p, out)

    def scale(self, c: int) -> "FpPoly":
        return FpPoly.make(self.p, [c * a for a in self.coeffs])

    def divmod(self, other: "FpPoly") -> tuple["FpPoly", "FpPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = list(other.coeffs)
        dd = len(d) - 1
        inv = pow(d[-1], p - 2, p)
        q = [0] * max(0, len(r) - dd)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i] * inv % p
            if c:
                q[i - dd] = c
                for j, dj in enumerate(d):
                    r[i - dd + j] = (r[i - dd + j] - c * dj) % p
        return FpPoly.make(p, q), FpPoly.make(p, r)

    def __mod__(self, other: "FpPoly") -> "FpPoly":
        return self.divmod(other)[1]

    def monic(self) -> "FpPoly":
        if self.is_zero():
            return self
        lc = self.coeffs[-1]
        if lc == 1:
            return self
        return self.scale(pow(lc, self.p - 2, self.p))

    def gcd(self, other: "FpPoly") -> "FpPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "FpPoly":
        return FpPoly.make(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def pow_mod(self, e: int, modulus: "FpPoly") -> "FpPoly":
        result = FpPoly.make(self.p, (1,))
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result

    def is_squarefree(self) -> bool:
        if self.is_zero():
            return False
        g = self.gcd(self.derivative())
        return g.degree == 0


def fp_root_count(f: FpPoly) -> int:
    """Number of distinct roots of f in F_p, via gcd with x^p - x."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.degree == 0:
        return 0
    xp = FpPoly.x(f.p).pow_mod(f.p, f)
    g = f.gcd(xp - FpPoly.x(f.p))
    return g.degree


def fp_splits_completely(f: FpPoly) -> bool:
    """True iff f is squarefree mod p and a product of distinct linear factors."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    if not f.is_squarefree():
        return False
    xp = FpPoly.x(f.p).pow_mod(f.p, f)
    return ((xp - FpPoly.x(f.p)) % f).is_zero()


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, b in enumerate(sieve) if b]


def rational_mod_p(num: int, den: int, p: int) -> int:
    """num/den mod p; den must be invertible."""
    if den % p == 0:
        raise ZeroDivisionError(f"denominator {den} not invertible mod {p}")
    return num * pow(den % p, p - 2, p) % p


__all__ = [
    "DEFAULT_FACTOR_BOUND",
    "FpPoly",
    "Fraction",
    "Infinity",
    "NotSquarefree",
    "PrimeSplitting",
    "SquarefreeInt",
    "TooLarge",
    "factor",
    "factor_squarefree",
    "field_disc",
    "fp_root_count",
    "fp_splits_completely",
    "hilbert_global",
    "hilbert_local",
    "hilbert_support",
    "is_probable_prime",
    "kronecker",
    "primes_up_to",
    "rational_mod_p",
    "splitting_type",
    "squarefree_part",
]
