"""Small finite fields F_{p^k} with element tuples, plus polynomial helpers.

Built for desk-scale curve computations: fields up to roughly p <= 100,
k <= 14, elements as coefficient tuples over F_p.  Polynomials over a
field are plain lists of element tuples (ascending).  Everything is
deterministic: modulus search and Cantor-Zassenhaus splits draw from
per-instance seeded generators.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .arith import FpPoly


def _fp_irreducible(p: int, k: int, rng: random.Random) -> tuple[int, ...]:
    """A monic irreducible of degree k over F_p (ascending coefficients)."""
    if k == 1:
        return (0, 1)
    x = FpPoly.x(p)
    while True:
        coeffs = [rng.randrange(p) for _ in range(k)] + [1]
        f = FpPoly(p, tuple(coeffs))
        if f.degree != k:
            continue
        xq = x.pow_mod(p**k, f)
        if not ((xq - x) % f).is_zero():
            continue
        ok = True
        for ell in {q for q in _prime_divisors(k)}:
            xe = x.pow_mod(p ** (k // ell), f)
            if f.gcd(xe - x).degree != 0:
                ok = False
                break
        if ok:
            return f.coeffs


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def GF(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> "Field":
    return Field(p, k, modulus)


class Field:
    """F_{p^k} = F_p[t]/(modulus); elements are length-k tuples."""

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None = None):
        self.p = p
        self.k = k
        self.q = p**k
        rng = random.Random((p, k, "twistlocal-gf").__hash__() & 0x7FFFFFFF)
        self.modulus = tuple(c % p for c in modulus) if modulus else _fp_irreducible(p, k, rng)
        self.zero = (0,) * k
        self.one = tuple([1] + [0] * (k - 1))
        self.gen = tuple([0, 1] + [0] * (k - 2)) if k >= 2 else (1,)
        # t^k .. t^(2k-2) reduced, for schoolbook reduction
        self._red = []
        if k > 1:
            cur = [(-c) % p for c in self.modulus[:-1]]
            for _ in range(k - 1):
                self._red.append(tuple(cur))
                cur = [0] + cur
                if cur[k] != 0:
                    lead = cur[k]
                    cur = [(cur[i] + lead * self._red[0][i]) % p if i < k else 0 for i in range(k + 1)]
                cur = cur[:k]
        self._rng = random.Random((p, k, "twistlocal-cz").__hash__() & 0x7FFFFFFF)

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    # -- element helpers ---------------------------------------------------
    def element(self, ints) -> tuple:
        xs = list(ints)[: self.k]
        xs += [0] * (self.k - len(xs))
        return tuple(c % self.p for c in xs)

    def from_int(self, n: int) -> tuple:
        return self.element([n])

    def in_prime_field(self, a: tuple) -> bool:
        return all(c == 0 for c in a[1:])

    def to_int(self, a: tuple) -> int:
        if not self.in_prime_field(a):
            raise ValueError(f"{a} is not in the prime field")
        return a[0]

    def add(self, a: tuple, b: tuple) -> tuple:
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a: tuple, b: tuple) -> tuple:
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a: tuple, b: tuple) -> tuple:
        p, k = self.p, self.k
        if k == 1:
            return (a[0] * b[0] % p,)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        out = [c % p for c in prod[:k]]
        for d in range(k, 2 * k - 1):
            c = prod[d] % p
            if c:
                red = self._red[d - k]
                for i in range(k):
                    out[i] = (out[i] + c * red[i]) % p
        return tuple(out)

    def smul(self, c: int, a: tuple) -> tuple:
        p = self.p
        c %= p
        return tuple(c * x % p for x in a)

    def inv(self, a: tuple) -> tuple:
        if a == self.zero:
            raise ZeroDivisionError("inverse of zero")
        p = self.p
        f = FpPoly.make(p, a)
        g = FpPoly(p, self.modulus)
        # extended euclid over F_p[t]
        r0, r1 = g, f
        s0, s1 = FpPoly(p, ()), FpPoly.make(p, (1,))
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        assert r0.degree == 0
        c = pow(r0.coeffs[0], p - 2, p)
        return self.element(list(s0.scale(c).coeffs))

    def div(self, a: tuple, b: tuple) -> tuple:
        return self.mul(a, self.inv(b))

    def pow(self, a: tuple, e: int) -> tuple:
        if e < 0:
            return self.pow(self.inv(a), -e)
        out = self.one
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def is_square(self, a: tuple) -> bool:
        if a == self.zero:
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one

    def sqrt(self, a: tuple):
        """A square root of a, or None; Tonelli-Shanks over F_q."""
        if a == self.zero:
            return self.zero
        q = self.q
        if not self.is_square(a):
            return None
        if q % 4 == 3:
            return self.pow(a, (q + 1) // 4)
        # write q - 1 = 2^s * m
        m = q - 1
        s = 0
        while m % 2 == 0:
            m //= 2
            s += 1
        z = None
        rng = random.Random(0xA5A5 ^ hash((self.p, self.k, a)) & 0x7FFFFFFF)
        while z is None:
            cand = self.random(rng)
            if cand != self.zero and not self.is_square(cand):
                z = cand
        c = self.pow(z, m)
        x = self.pow(a, (m + 1) // 2)
        t = self.pow(a, m)
        e = s
        while t != self.one:
            # order of t is 2^i
            i = 0
            tt = t
            while tt != self.one:
                tt = self.mul(tt, tt)
                i += 1
            b = self.pow(c, 1 << (e - i - 1))
            x = self.mul(x, b)
            t = self.mul(t, self.mul(b, b))
            c = self.mul(b, b)
            e = i
        return x

    def random(self, rng: random.Random) -> tuple:
        return tuple(rng.randrange(self.p) for _ in range(self.k))

    def elements(self):
        """Iterate all q elements (only sane for small q)."""
        p, k = self.p, self.k

        def rec(i, acc):
            if i == k:
                yield tuple(acc)
                return
            for c in range(p):
                yield from rec(i + 1, acc + [c])

        yield from rec(0, [])

    def frobenius(self, a: tuple) -> tuple:
        return self.pow(a, self.p)


# ---------------------------------------------------------------------------
# polynomials over a Field: lists of element tuples, ascending, trimmed
# ---------------------------------------------------------------------------


def pf_trim(F: Field, f: list) -> list:
    while f and f[-1] == F.zero:
        f.pop()
    return f


def pf_add(F: Field, f: list, g: list) -> list:
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else F.zero
        b = g[i] if i < len(g) else F.zero
        out.append(F.add(a, b))
    return pf_trim(F, out)


def pf_sub(F: Field, f: list, g: list) -> list:
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else F.zero
        b = g[i] if i < len(g) else F.zero
        out.append(F.sub(a, b))
    return pf_trim(F, out)


def pf_mul(F: Field, f: list, g: list) -> list:
    if not f or not g:
        return []
    out = [F.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == F.zero:
            continue
        for j, b in enumerate(g):
            if b != F.zero:
                out[i + j] = F.add(out[i + j], F.mul(a, b))
    return pf_trim(F, out)


def pf_smul(F: Field, c: tuple, f: list) -> list:
    return pf_trim(F, [F.mul(c, a) for a in f])


def pf_divmod(F: Field, f: list, g: list) -> tuple[list, list]:
    if not g:
        raise ZeroDivisionError
    r = list(f)
    dg = len(g) - 1
    inv = F.inv(g[-1])
    q = [F.zero] * max(0, len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = F.mul(r[i], inv)
        if c != F.zero:
            q[i - dg] = c
            for j, gj in enumerate(g):
                r[i - dg + j] = F.sub(r[i - dg + j], F.mul(c, gj))
    return pf_trim(F, q), pf_trim(F, r)


def pf_mod(F: Field, f: list, g: list) -> list:
    return pf_divmod(F, f, g)[1]


def pf_monic(F: Field, f: list) -> list:
    if not f:
        return f
    return pf_smul(F, F.inv(f[-1]), f)


def pf_gcd(F: Field, f: list, g: list) -> list:
    a, b = list(f), list(g)
    while b:
        a, b = b, pf_mod(F, a, b)
    return pf_monic(F, a)


def pf_powmod(F: Field, base: list, e: int, mod: list) -> list:
    out = [F.one]
    b = pf_mod(F, base, mod)
    while e:
        if e & 1:
            out = pf_mod(F, pf_mul(F, out, b), mod)
        b = pf_mod(F, pf_mul(F, b, b), mod)
        e >>= 1
    return out


def pf_eval(F: Field, f: list, x: tuple) -> tuple:
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def pf_roots(F: Field, f: list, rng: random.Random | None = None) -> list:
    """Distinct roots of f in F, by gcd with x^q - x and CZ splitting."""
    if not f:
        raise ValueError("zero polynomial")
    rng = rng or F._rng
    x = [F.zero, F.one]
    xq = pf_powmod(F, x, F.q, f)
    g = pf_gcd(F, f, pf_sub(F, xq, x))
    out: list = []

    def split(h):
        d = len(h) - 1
        if d == 0:
            return
        if d == 1:
            out.append(F.neg(F.mul(h[0], F.inv(h[1]))))
            return
        while True:
            a = [F.random(rng), F.one]
            t = pf_powmod(F, a, (F.q - 1) // 2, h)
            t = pf_sub(F, t, [F.one])
            u = pf_gcd(F, h, t)
            if 0 < len(u) - 1 < d:
                split(u)
                split(pf_divmod(F, h, u)[0])
                return

    if F.p == 2:
        raise NotImplementedError("CZ splitting here assumes odd q")
    split(g)
    return out


class Embedding:
    """F_{p^a} -> F_{p^b} with a | b, via a chosen root of the small modulus."""

    def __init__(self, small: Field, big: Field):
        if small.p != big.p or big.k % small.k != 0:
            raise ValueError("no embedding")
        self.small = small
        self.big = big
        if small.k == 1:
            self.image_gen = big.one
        else:
            mod = [big.from_int(c) for c in small.modulus]
            roots = pf_roots(big, mod)
            assert roots, "modulus must split in the big field"
            self.image_gen = sorted(roots)[0]
        # powers of the image generator, as vectors for down-conversion
        self.powers = [big.one]
        for _ in range(small.k - 1):
            self.powers.append(big.mul(self.powers[-1], self.image_gen))

    def up(self, a: tuple) -> tuple:
        out = self.big.zero
        for c, pw in zip(a, self.powers):
            if c:
                out = self.big.add(out, self.big.smul(c, pw))
        return out

    def down(self, y: tuple) -> tuple:
        """Preimage of y, which must lie in the image subfield."""
        p = self.big.p
        # solve sum c_i * powers[i] = y over F_p by Gaussian elimination
        cols = [list(pw) for pw in self.powers]
        rhs = list(y)
        n = self.big.k
        m = self.small.k
        # build augmented matrix (n x m | rhs)
        mat = [[cols[j][i] % p for j in range(m)] + [rhs[i] % p] for i in range(n)]
        piv = []
        r = 0
        for c in range(m):
            sel = next((i for i in range(r, n) if mat[i][c] % p), None)
            if sel is None:
                continue
            mat[r], mat[sel] = mat[sel], mat[r]
            invv = pow(mat[r][c], p - 2, p)
            mat[r] = [v * invv % p for v in mat[r]]
            for i in range(n):
                if i != r and mat[i][c]:
                    f = mat[i][c]
                    mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
            piv.append(c)
            r += 1
        sol = [0] * m
        for i, c in enumerate(piv):
            sol[c] = mat[i][m]
        for i in range(r, n):
            if mat[i][m] % p:
                raise ValueError("element not in the image subfield")
        cand = self.small.element(sol)
        if self.up(cand) != y:
            raise ValueError("element not in the image subfield")
        return cand


__all__ = ["Embedding", "Field", "GF", "pf_add", "pf_divmod", "pf_eval", "pf_gcd",
           "pf_mod", "pf_monic", "pf_mul", "pf_powmod", "pf_roots", "pf_smul",
           "pf_sub", "pf_trim"]
