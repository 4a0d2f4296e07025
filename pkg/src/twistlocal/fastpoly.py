"""Vectorized polynomial arithmetic over F_p and F_{p^2}.

Coefficients are pairs (re, im) of int64 numpy arrays with respect to the
basis (1, s) of F_{p^2} = F_p[s]/(s^2 - ns); polynomials over F_p are the
im = 0 case.  Degrees up to a few hundred at p <= 100 stay far below
int64 overflow.  Division polynomials of an elliptic curve and the
x-coordinate multiplication maps are provided on top.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .arith import kronecker


def smallest_nonresidue(p: int) -> int:
    for n in range(2, p):
        if kronecker(n, p) == -1:
            return n
    raise ValueError("no nonresidue found (p = 2?)")


@dataclass(frozen=True)
class Q2Ctx:
    p: int
    ns: int  # s^2 = ns, a fixed nonresidue

    @staticmethod
    def make(p: int) -> "Q2Ctx":
        return Q2Ctx(p, smallest_nonresidue(p))


Poly = tuple[np.ndarray, np.ndarray]


def poly(ctx: Q2Ctx, re, im=None) -> Poly:
    r = np.asarray(list(re), dtype=np.int64) % ctx.p
    i = (
        np.zeros_like(r)
        if im is None
        else np.asarray(list(im), dtype=np.int64) % ctx.p
    )
    if len(i) < len(r):
        i = np.concatenate([i, np.zeros(len(r) - len(i), dtype=np.int64)])
    elif len(r) < len(i):
        r = np.concatenate([r, np.zeros(len(i) - len(r), dtype=np.int64)])
    return trim((r, i))


def zero(ctx: Q2Ctx) -> Poly:
    return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))


def one(ctx: Q2Ctx) -> Poly:
    return (np.ones(1, dtype=np.int64), np.zeros(1, dtype=np.int64))


def xpoly(ctx: Q2Ctx) -> Poly:
    return (np.array([0, 1], dtype=np.int64), np.zeros(2, dtype=np.int64))


def trim(f: Poly) -> Poly:
    r, i = f
    n = len(r)
    while n > 0 and r[n - 1] == 0 and i[n - 1] == 0:
        n -= 1
    return (r[:n], i[:n])


def deg(f: Poly) -> int:
    return len(f[0]) - 1


def is_zero(f: Poly) -> bool:
    return len(f[0]) == 0


def is_real(f: Poly) -> bool:
    return not f[1].any()


def eq(f: Poly, g: Poly) -> bool:
    f, g = trim(f), trim(g)
    return len(f[0]) == len(g[0]) and bool((f[0] == g[0]).all() and (f[1] == g[1]).all())


def add(ctx: Q2Ctx, f: Poly, g: Poly) -> Poly:
    n = max(len(f[0]), len(g[0]))
    r = np.zeros(n, dtype=np.int64)
    i = np.zeros(n, dtype=np.int64)
    r[: len(f[0])] += f[0]
    i[: len(f[1])] += f[1]
    r[: len(g[0])] += g[0]
    i[: len(g[1])] += g[1]
    return trim((r % ctx.p, i % ctx.p))


def sub(ctx: Q2Ctx, f: Poly, g: Poly) -> Poly:
    n = max(len(f[0]), len(g[0]))
    r = np.zeros(n, dtype=np.int64)
    i = np.zeros(n, dtype=np.int64)
    r[: len(f[0])] += f[0]
    i[: len(f[1])] += f[1]
    r[: len(g[0])] -= g[0]
    i[: len(g[1])] -= g[1]
    return trim((r % ctx.p, i % ctx.p))


def mul(ctx: Q2Ctx, f: Poly, g: Poly) -> Poly:
    if is_zero(f) or is_zero(g):
        return zero(ctx)
    fr, fi = f
    gr, gi = g
    if not fi.any() and not gi.any():
        return trim((np.convolve(fr, gr) % ctx.p, np.zeros(len(fr) + len(gr) - 1, dtype=np.int64)))
    rr = np.convolve(fr, gr) + ctx.ns * np.convolve(fi, gi)
    ii = np.convolve(fr, gi) + np.convolve(fi, gr)
    return trim((rr % ctx.p, ii % ctx.p))


def smul(ctx: Q2Ctx, c: tuple[int, int], f: Poly) -> Poly:
    cr, ci = c[0] % ctx.p, c[1] % ctx.p
    rr = cr * f[0] + ctx.ns * ci * f[1]
    ii = cr * f[1] + ci * f[0]
    return trim((rr % ctx.p, ii % ctx.p))


def _coef_inv(ctx: Q2Ctx, c: tuple[int, int]) -> tuple[int, int]:
    a, b = c
    p = ctx.p
    n = (a * a - ctx.ns * b * b) % p
    ninv = pow(n, p - 2, p)
    return (a * ninv % p, (-b * ninv) % p)


def divmod_(ctx: Q2Ctx, f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if is_zero(g):
        raise ZeroDivisionError
    p = ctx.p
    dg = deg(g)
    df = deg(f)
    if df < dg:
        return zero(ctx), trim((f[0].copy(), f[1].copy()))
    lr, li = int(g[0][-1]), int(g[1][-1])
    inv_r, inv_i = _coef_inv(ctx, (lr, li))
    rr, ri = f[0].copy(), f[1].copy()
    qr = np.zeros(df - dg + 1, dtype=np.int64)
    qi = np.zeros(df - dg + 1, dtype=np.int64)
    gr, gi = g
    for k in range(df - dg, -1, -1):
        ar, ai = int(rr[k + dg]), int(ri[k + dg])
        if ar == 0 and ai == 0:
            continue
        cr = (ar * inv_r + ctx.ns * ai * inv_i) % p
        ci = (ar * inv_i + ai * inv_r) % p
        qr[k], qi[k] = cr, ci
        rr[k : k + dg + 1] = (rr[k : k + dg + 1] - cr * gr - ctx.ns * ci * gi) % p
        ri[k : k + dg + 1] = (ri[k : k + dg + 1] - cr * gi - ci * gr) % p
    return trim((qr, qi)), trim((rr, ri))


def mod(ctx: Q2Ctx, f: Poly, g: Poly) -> Poly:
    return divmod_(ctx, f, g)[1]


def monic(ctx: Q2Ctx, f: Poly) -> Poly:
    if is_zero(f):
        return f
    c = _coef_inv(ctx, (int(f[0][-1]), int(f[1][-1])))
    return smul(ctx, c, f)


def gcd(ctx: Q2Ctx, f: Poly, g: Poly) -> Poly:
    a, b = f, g
    while not is_zero(b):
        a, b = b, mod(ctx, a, b)
    return monic(ctx, a)


def powmod(ctx: Q2Ctx, base: Poly, e: int, modulus: Poly) -> Poly:
    out = one(ctx)
    b = mod(ctx, base, modulus)
    while e:
        if e & 1:
            out = mod(ctx, mul(ctx, out, b), modulus)
        b = mod(ctx, mul(ctx, b, b), modulus)
        e >>= 1
    return out


def derivative(ctx: Q2Ctx, f: Poly) -> Poly:
    if deg(f) < 1:
        return zero(ctx)
    ks = np.arange(1, len(f[0]), dtype=np.int64)
    return trim(((f[0][1:] * ks) % ctx.p, (f[1][1:] * ks) % ctx.p))


def is_squarefree(ctx: Q2Ctx, f: Poly) -> bool:
    return deg(gcd(ctx, f, derivative(ctx, f))) == 0


def eval_real_points(ctx: Q2Ctx, f: Poly, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized evaluation at F_p points."""
    rr = np.zeros_like(xs)
    ii = np.zeros_like(xs)
    for cr, ci in zip(f[0][::-1], f[1][::-1]):
        rr = (rr * xs + cr) % ctx.p
        ii = (ii * xs + ci) % ctx.p
    return rr, ii


def real_roots(ctx: Q2Ctx, f: Poly) -> list[int]:
    """Distinct roots of f lying in F_p (brute sweep, p <= a few hundred)."""
    xs = np.arange(ctx.p, dtype=np.int64)
    rr, ii = eval_real_points(ctx, f, xs)
    return [int(x) for x in xs[(rr == 0) & (ii == 0)]]


def factor_equal_degree(ctx: Q2Ctx, f: Poly, d: int, q: int, rng: random.Random) -> list[Poly]:
    """Split a squarefree product of degree-d irreducibles over F_q (odd q)."""
    f = monic(ctx, f)
    n = deg(f)
    if n == 0:
        return []
    if n == d:
        return [f]
    out = []
    stack = [f]
    exp = (q**d - 1) // 2
    while stack:
        h = stack.pop()
        if deg(h) == d:
            out.append(h)
            continue
        while True:
            ar = [rng.randrange(ctx.p) for _ in range(deg(h))]
            ai = [rng.randrange(ctx.p) if q != ctx.p else 0 for _ in range(deg(h))]
            a = poly(ctx, ar, ai)
            if is_zero(a):
                continue
            t = powmod(ctx, a, exp, h)
            t = sub(ctx, t, one(ctx))
            u = gcd(ctx, h, t)
            if 0 < deg(u) < deg(h):
                stack.append(u)
                stack.append(divmod_(ctx, h, u)[0])
                break
    return out


def factor_squarefree_poly(ctx: Q2Ctx, f: Poly, q: int, rng: random.Random) -> list[Poly]:
    """Irreducible factors of a squarefree f over F_q via DDF + EDF."""
    f = monic(ctx, f)
    out: list[Poly] = []
    rem = f
    x = xpoly(ctx)
    frob = powmod(ctx, x, q, rem)
    d = 1
    cur = frob
    while deg(rem) >= 2 * d:
        g = gcd(ctx, rem, sub(ctx, cur, x))
        if deg(g) > 0:
            out.extend(factor_equal_degree(ctx, g, d, q, rng))
            rem = divmod_(ctx, rem, g)[0]
            if deg(rem) == 0:
                break
            cur = mod(ctx, cur, rem)
        d += 1
        if deg(rem) < 2 * d:
            break
        cur = powmod(ctx, cur, q, rem)
    if deg(rem) > 0:
        out.append(monic(ctx, rem))
    return out


# ---------------------------------------------------------------------------
# division polynomials for y^2 = x^3 + a2 x^2 + a4 x + a6 (a1 = a3 = 0)
# ---------------------------------------------------------------------------


class DivisionPolys:
    """The x-only division polynomial ladder f_k of a curve.

    psi_k = f_k for odd k and psi_k = 2y * ... wait, psi_2 = 2y here, and
    psi_k = psi_2 * f_k for even k; Y = psi_2^2 = 4 * (x^3+a2x^2+a4x+a6).
    x([k]P) = x - Y f_{k-1} f_{k+1} / f_k^2 for odd k, and
    x([k]P) = x - f_{k-1} f_{k+1} / (Y f_k^2) for even k.
    """

    def __init__(self, ctx: Q2Ctx, a2, a4, a6):
        self.ctx = ctx
        as_pair = lambda c: c if isinstance(c, tuple) else (c, 0)
        self.a2, self.a4, self.a6 = map(as_pair, (a2, a4, a6))
        p = ctx.p
        a2r, a2i = self.a2
        a4r, a4i = self.a4
        a6r, a6i = self.a6
        self.F = poly(ctx, [a6r, a4r, a2r, 1], [a6i, a4i, a2i, 0])
        self.Y = smul(ctx, (4, 0), self.F)
        b2 = (4 * a2r % p, 4 * a2i % p)
        b4 = (2 * a4r % p, 2 * a4i % p)
        b6 = (4 * a6r % p, 4 * a6i % p)

        def cmul(a, b):
            return (
                (a[0] * b[0] + ctx.ns * a[1] * b[1]) % p,
                (a[0] * b[1] + a[1] * b[0]) % p,
            )

        def cadd(a, b):
            return ((a[0] + b[0]) % p, (a[1] + b[1]) % p)

        def csub(a, b):
            return ((a[0] - b[0]) % p, (a[1] - b[1]) % p)

        def csm(n, a):
            return (n * a[0] % p, n * a[1] % p)

        b8 = csub(cmul((4, 0), cmul(self.a2, self.a6)), cmul(self.a4, self.a4))
        f3 = [b8, csm(3, b6), csm(3, b4), b2, (3, 0)]
        f4 = [
            csub(cmul(b4, b8), cmul(b6, b6)),
            csub(cmul(b2, b8), cmul(b4, b6)),
            csm(10, b8),
            csm(10, b6),
            csm(5, b4),
            b2,
            (2, 0),
        ]

        def mk(cs):
            return poly(ctx, [c[0] for c in cs], [c[1] for c in cs])

        self._f: dict[int, Poly] = {
            0: zero(ctx),
            1: one(ctx),
            2: one(ctx),
            3: mk(f3),
            4: mk(f4),
        }

    def f(self, k: int) -> Poly:
        ctx = self.ctx
        if k in self._f:
            return self._f[k]
        m = k // 2
        if k % 2 == 1:
            a = mul(ctx, self.f(m + 2), mul(ctx, self.f(m), mul(ctx, self.f(m), self.f(m))))
            b3 = mul(ctx, self.f(m + 1), mul(ctx, self.f(m + 1), self.f(m + 1)))
            b = mul(ctx, self.f(m - 1), b3)
            Y2 = mul(ctx, self.Y, self.Y)
            if m % 2 == 0:
                val = sub(ctx, mul(ctx, Y2, a), b)
            else:
                val = sub(ctx, a, mul(ctx, Y2, b))
        else:
            s1 = mul(ctx, self.f(m + 2), mul(ctx, self.f(m - 1), self.f(m - 1)))
            s2 = mul(ctx, self.f(m - 2), mul(ctx, self.f(m + 1), self.f(m + 1)))
            val = mul(ctx, self.f(m), sub(ctx, s1, s2))
        self._f[k] = val
        return val

    def mult_maps(self, k: int) -> tuple[Poly, Poly]:
        """(num, den) with x([k]P) = num(x)/den(x)."""
        ctx = self.ctx
        if k == 1:
            return xpoly(ctx), one(ctx)
        fk = self.f(k)
        fk2 = mul(ctx, fk, fk)
        cross = mul(ctx, self.f(k - 1), self.f(k + 1))
        if k % 2 == 1:
            den = fk2
            num = sub(ctx, mul(ctx, xpoly(ctx), den), mul(ctx, self.Y, cross))
        else:
            den = mul(ctx, self.Y, fk2)
            num = sub(ctx, mul(ctx, xpoly(ctx), den), cross)
        return num, den

    def torsion_poly(self, ell: int) -> Poly:
        """Vanishing locus of the x-coordinates of E[ell] - O (odd ell: f_ell;
        ell = 2: the cubic itself)."""
        if ell == 2:
            return self.F
        return self.f(ell)


__all__ = [
    "DivisionPolys",
    "Poly",
    "Q2Ctx",
    "add",
    "deg",
    "derivative",
    "divmod_",
    "eq",
    "eval_real_points",
    "factor_equal_degree",
    "factor_squarefree_poly",
    "gcd",
    "is_real",
    "is_squarefree",
    "is_zero",
    "mod",
    "monic",
    "mul",
    "one",
    "poly",
    "powmod",
    "real_roots",
    "smallest_nonresidue",
    "smul",
    "sub",
    "trim",
    "xpoly",
    "zero",
]
