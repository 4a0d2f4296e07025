"""Class groups of binary quadratic forms of discriminant -4N.

The class group is held extensionally (every reduced form), which keeps
composition, 2-torsion counting and the square subgroup directly testable
at the sizes we care about.  Composition goes through multiplication of
the corresponding ideals of Z[sqrt(-N)] in Hermite normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import TooLarge, factor, factor_squarefree

DEFAULT_DISC_BOUND = 4 * 10**5


class DiscriminantMismatch(ValueError):
    """Composition of forms with different discriminants."""


@dataclass(frozen=True)
class BQForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def inverse(self) -> "BQForm":
        return reduce_form(BQForm(self.a, -self.b, self.c))

    def __repr__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def reduce_form(f: BQForm) -> BQForm:
    """The reduced representative of the class of f (D < 0, a > 0)."""
    a, b, c = f.a, f.b, f.c
    if f.disc >= 0 or a <= 0:
        raise ValueError("only positive definite forms are supported")
    while True:
        if -a < b <= a <= c:
            if a == c and b < 0:
                b = -b
            return BQForm(a, b, c)
        # normalize b into (-a, a]
        if b > a or b <= -a:
            r = (a - b) // (2 * a)
            b2 = b + 2 * r * a
            c = a * r * r + b * r + c
            b = b2
        if a > c:
            a, b, c = c, -b, a
        elif a == c and b < 0:
            b = -b


def principal_form(D: int) -> BQForm:
    if D % 4 != 0:
        raise ValueError("only discriminants divisible by 4 occur here")
    return BQForm(1, 0, -D // 4)


def reduced_forms(D: int) -> list[BQForm]:
    """All primitive reduced forms of discriminant D < 0, D = 0 mod 4."""
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == c or -b == a):
                continue
            f = BQForm(a, b, c)
            if f.is_primitive():
                out.append(f)
    return sorted(out, key=lambda f: (f.a, f.b, f.c))


def _hnf_pair(gens: list[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF basis [(A, 0), (B, s)] of the Z-module spanned by (x, y) pairs."""
    rows = [g for g in gens if g != (0, 0)]
    # clear the y-column down to one row via extended gcd
    while True:
        nz = [r for r in rows if r[1] != 0]
        if len(nz) <= 1:
            break
        nz.sort(key=lambda r: abs(r[1]))
        x0, y0 = nz[0]
        new = [nz[0]]
        for x, y in nz[1:]:
            q = y // y0
            r = (x - q * x0, y - q * y0)
            if r != (0, 0):
                new.append(r)
        rows = [r for r in rows if r[1] == 0] + new
    s_row = next((r for r in rows if r[1] != 0), (0, 0))
    A = 0
    for x, y in rows:
        if y == 0:
            A = math.gcd(A, abs(x))
    B, s = s_row
    if s < 0:
        B, s = -B, -s
    if A:
        B %= A
    return A, B, s


def compose(f: BQForm, g: BQForm) -> BQForm:
    """Gauss composition via ideal multiplication, returned reduced."""
    D = f.disc
    if D != g.disc:
        raise DiscriminantMismatch(f"{f.disc} != {g.disc}")
    # ideal of (a, b, c) is Z*a + Z*(-b/2 + w), w = sqrt(D)/2, w^2 = D/4
    n = -D // 4
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    h1 = -b1 // 2 if b1 % 2 == 0 else None
    h2 = -b2 // 2 if b2 % 2 == 0 else None
    if h1 is None or h2 is None:
        raise ValueError("forms of discriminant -4N have even b")
    gens = [
        (a1 * a2, 0),
        (a1 * h2, a1),
        (a2 * h1, a2),
        (h1 * h2 - n, h1 + h2),
    ]
    A, B, s = _hnf_pair(gens)
    if s == 0 or A % s or B % s:
        raise ArithmeticError("ideal product is not primitive times s")
    a3 = A // s
    b3 = (-2 * (B // s)) % (2 * a3)
    c3_num = b3 * b3 - D
    if c3_num % (4 * a3):
        b3 -= 2 * a3
        c3_num = b3 * b3 - D
    c3 = c3_num // (4 * a3)
    return reduce_form(BQForm(a3, b3, c3))


@dataclass(frozen=True)
class ClassGroup:
    D: int
    h: int
    reps: tuple[BQForm, ...]
    two_torsion: int
    two_g_size: int

    @property
    def principal(self) -> BQForm:
        return self.reps[0]


@lru_cache(maxsize=None)
def class_group(N: int, bound: int = DEFAULT_DISC_BOUND) -> ClassGroup:
    """The form class group of discriminant D = -4N, N squarefree >= 2."""
    if N < 2:
        raise ValueError("N must be a squarefree integer >= 2")
    factor_squarefree(N)
    D = -4 * N
    if -D > bound:
        raise TooLarge(f"|D| = {-D} exceeds bound {bound}")
    reps = reduced_forms(D)
    pr = principal_form(D)
    reps = [pr] + [f for f in reps if f != pr]
    squares = {compose(f, f) for f in reps}
    two_torsion = sum(1 for f in reps if compose(f, f) == pr)
    h = len(reps)
    assert h % two_torsion == 0 and len(squares) == h // two_torsion
    return ClassGroup(D=D, h=h, reps=tuple(reps), two_torsion=two_torsion, two_g_size=len(squares))


def density_SN(N: int) -> Fraction:
    """(|2G| + 1) / (2|G|) for G the class group of Z[sqrt(-N)]."""
    cg = class_group(N)
    return Fraction(cg.two_g_size + 1, 2 * cg.h)


def _prime_disc(q: int) -> int:
    return q if q % 4 == 1 else -q


def genus_field(N: int) -> tuple[int, ...]:
    """Prime-discriminant generators of the genus field of Q(sqrt(-N)).

    The compositum of Q(sqrt(d)) over the returned d is the genus field;
    the d multiply to the field discriminant of Q(sqrt(-N)).
    """
    if N < 1:
        raise ValueError("N must be positive")
    sf = factor_squarefree(N)
    d_field = -N if (-N) % 4 == 1 else -4 * N
    odd = [_prime_disc(q) for q in sf.primes if q % 2 == 1]
    rest = d_field
    for d in odd:
        rest //= d
    out = list(odd)
    if rest != 1:
        if rest not in (-4, 8, -8):
            raise ArithmeticError(f"bad two-part {rest} for N={N}")
        out.append(rest)
    return tuple(sorted(out))


def genus_characters(N: int) -> tuple[int, ...]:
    """Quadratic generators attached to the order Z[sqrt(-N)] (disc -4N).

    One generator q* per odd prime q | N, plus a two-part generator that
    depends on N mod 8; N = 3 mod 4 contributes no two-part generator.
    The count mu satisfies 2^(mu-1) = #(ambiguous classes of disc -4N).
    """
    sf = factor_squarefree(N)
    out = [_prime_disc(q) for q in sf.primes if q % 2 == 1]
    m = N % 8
    if m in (1, 5):
        out.append(-4)
    elif m == 2:
        out.append(-8)
    elif m == 6:
        out.append(8)
    return tuple(sorted(out))


def real_genus_generators(N: int) -> tuple[int, ...]:
    """Positive products of the order's genus generators.

    Each returned m > 1 has sqrt(m) inside the real subfield Q(j) of the
    ring class field of Z[sqrt(-N)].
    """
    gens = genus_characters(N)
    out = set()
    for mask in range(1, 1 << len(gens)):
        prod = 1
        for i, g in enumerate(gens):
            if mask & (1 << i):
                prod *= g
        if prod > 1:
            out.add(prod)
    return tuple(sorted(out))


__all__ = [
    "BQForm",
    "ClassGroup",
    "DiscriminantMismatch",
    "class_group",
    "compose",
    "density_SN",
    "genus_characters",
    "genus_field",
    "principal_form",
    "real_genus_generators",
    "reduce_form",
    "reduced_forms",
]
