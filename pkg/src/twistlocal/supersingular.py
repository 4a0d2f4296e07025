"""Supersingular loci, automorphism counts, and fixed-point detection mod p.

Everything here is desk scale and exact: supersingular j-invariants via
the Hasse invariant (with the Legendre-curve polynomial picking up the
conjugate pairs outside F_p), enumeration of level structures on
supersingular curves up to automorphism, the modular-curve genus ladder,
and a brute-force detector for points of X_0(N) mod p fixed by the main
involution, built on Velu isogenies and division polynomials.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import fastpoly as fq
from .arith import TooLarge, factor_squarefree, is_probable_prime, kronecker
from .gf import GF, Embedding, pf_eval, pf_mul, pf_roots

SS_P_BOUND = 1000
COUNT_P_BOUND = 100
COUNT_M_BOUND = 100
EXT_DEGREE_CAP = 4  # extensions of F_{p^2} used for subgroup enumeration


@dataclass(frozen=True)
class SSPoint:
    j: object  # int for j in F_p, else (a, b) over the fixed model of F_{p^2}
    subgroup_order: int
    aut_order: int


@dataclass(frozen=True)
class SSCount:
    total: int
    points: tuple[SSPoint, ...]


@lru_cache(maxsize=None)
def _fact_table(p: int) -> list[int]:
    out = [1] * p
    for i in range(1, p):
        out[i] = out[i - 1] * i % p
    return out


def _hasse_invariant(a: int, b: int, p: int) -> int:
    """Coefficient of x^(p-1) in (x^3 + a x + b)^((p-1)/2) mod p."""
    m = (p - 1) // 2
    fact = _fact_table(p)

    def inv(n):
        return pow(n, p - 2, p)

    total = 0
    i0 = (m + 1) // 2
    for i in range(i0, 2 * m // 3 + 1):
        j = 2 * m - 3 * i
        k = 2 * i - m
        if j < 0 or k < 0:
            continue
        coef = fact[m] * inv(fact[i] * fact[j] % p * fact[k] % p) % p
        total = (total + coef * pow(a, j, p) * pow(b, k, p)) % p
    return total


def _model_from_j_int(j: int, p: int) -> tuple[int, int, int]:
    """(a2, a4, a6) of a curve over F_p with the given j-invariant."""
    j %= p
    if p == 3:
        if j == 0:
            return (0, p - 1, 0)  # y^2 = x^3 - x, supersingular
        c = (-pow(j, p - 2, p)) % p
        return (1, 0, c)  # y^2 = x^3 + x^2 + c has j = -1/c
    if j == 0:
        return (0, 0, 1)
    if j == 1728 % p:
        return (0, 1, 0)
    k = j * pow((1728 - j) % p, p - 2, p) % p
    return (0, 3 * k % p, 2 * k % p)


def _j_invariant(a2, a4, a6, p: int) -> int:
    b2 = 4 * a2 % p
    b4 = 2 * a4 % p
    b6 = 4 * a6 % p
    b8 = (4 * a2 * a6 - a4 * a4) % p
    c4 = (b2 * b2 - 24 * b4) % p
    disc = (-b2 * b2 % p * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6) % p
    if disc == 0:
        raise ValueError("singular curve")
    return c4**3 * pow(disc, p - 2, p) % p


def _expected_ss_count(p: int) -> int:
    if p == 2 or p == 3:
        return 1
    r = p % 12
    return p // 12 + {1: 0, 5: 1, 7: 1, 11: 2}[r]


def ss_j_invariants(p: int, bound: int = SS_P_BOUND):
    """All supersingular j-invariants in characteristic p.

    Values in F_p come back as ints; conjugate pairs outside F_p as pairs
    (a, b) meaning a + b*s over F_{p^2} = F_p(s), s^2 the least nonresidue.
    """
    if not is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > bound:
        raise TooLarge(f"p = {p} exceeds bound {bound}")
    if p in (2, 3):
        return [0]
    found: list = []
    for j in range(p):
        a2, a4, a6 = _model_from_j_int(j, p)
        if _hasse_invariant(a4, a6, p) == 0:
            found.append(j)
    expected = _expected_ss_count(p)
    missing = expected - len(found)
    if missing > 0:
        found.extend(_conjugate_pair_js(p))
    assert len(found) == expected, (p, len(found), expected)
    return sorted(found, key=lambda v: (0, v) if isinstance(v, int) else (1, v))


def _conjugate_pair_js(p: int) -> list:
    """Supersingular j's in F_{p^2} - F_p, via the Legendre-curve polynomial."""
    ctx = fq.Q2Ctx.make(p)
    m = (p - 1) // 2
    fact = _fact_table(p)
    coeffs = []
    for i in range(m + 1):
        c = fact[m] * pow(fact[i] * fact[m - i] % p, p - 2, p) % p
        coeffs.append(c * c % p)
    H = fq.poly(ctx, coeffs)
    rng = random.Random(0x55AA ^ p)
    # strip the lambda-roots in F_p; quadratic factors carry the rest
    xs = np.arange(p, dtype=np.int64)
    rr, _ = fq.eval_real_points(ctx, H, xs)
    for lam in xs[rr == 0]:
        H = fq.divmod_(ctx, H, fq.poly(ctx, [-int(lam), 1]))[0]
    quads = fq.factor_equal_degree(ctx, H, 2, p, rng) if fq.deg(H) > 0 else []
    F2 = GF(p, 2, modulus=((-ctx.ns) % p, 0, 1))
    out = set()
    for qd in quads:
        b = int(qd[0][1]) % p
        c = int(qd[0][0]) % p
        disc = (b * b - 4 * c) % p
        sq = F2.sqrt(F2.from_int(disc))
        assert sq is not None
        inv2 = pow(2, p - 2, p)
        for sgn in (1, -1):
            lam = F2.smul(inv2, F2.add(F2.from_int(-b), F2.smul(sgn, sq)))
            num = F2.add(F2.sub(F2.mul(lam, lam), lam), F2.one)
            num3 = F2.mul(num, F2.mul(num, num))
            den = F2.mul(F2.mul(lam, lam), F2.mul(F2.sub(lam, F2.one), F2.sub(lam, F2.one)))
            j = F2.smul(256, F2.mul(num3, F2.inv(den)))
            if j[1] != 0:
                out.add(j)
    return sorted(out)


# ---------------------------------------------------------------------------
# level structures on supersingular curves over F_{p^2}
# ---------------------------------------------------------------------------


def _f2_field(p: int):
    ctx = fq.Q2Ctx.make(p)
    return ctx, GF(p, 2, modulus=((-ctx.ns) % p, 0, 1))


def _order_mod_pm(p: int, ell: int) -> int:
    """Multiplicative order of p in (Z/ell)* / {+-1}."""
    k = 1
    acc = p % ell
    while acc != 1 and acc != ell - 1:
        acc = acc * p % ell
        k += 1
    return k


def _kernel_key(F2, coeffs) -> tuple:
    return tuple(coeffs)


def _subgroups_of_level(ctx, F2, dp: fq.DivisionPolys, ell: int, p: int, rng) -> list[tuple]:
    """Kernel polynomials (coeff tuples over F_{p^2}) of all cyclic
    order-ell subgroups of a supersingular curve with scalar Frobenius."""
    if ell == 2:
        fac = fq.factor_squarefree_poly(ctx, dp.F, p * p, rng)
        assert all(fq.deg(g) == 1 for g in fac), "2-torsion not rational over F_{p^2}"
        keys = []
        for g in fac:
            x0 = F2.neg((int(g[0][0]), int(g[1][0])))
            keys.append(_kernel_key(F2, [F2.neg(x0), F2.one]))
        assert len(keys) == 3
        return sorted(keys)
    mprime = _order_mod_pm(p, ell)
    if mprime > EXT_DEGREE_CAP:
        raise TooLarge(
            f"level {ell} needs extension degree {mprime} > {EXT_DEGREE_CAP} over F_(p^2)"
        )
    psi = dp.torsion_poly(ell)
    fac = fq.factor_squarefree_poly(ctx, psi, p * p, rng)
    assert all(fq.deg(g) == mprime for g in fac), (ell, p, sorted(map(fq.deg, fac)))
    t = (ell - 1) // 2
    K = GF(p, 2 * mprime) if mprime > 1 else F2
    emb = Embedding(F2, K)

    def up_poly(g):
        return [emb.up((int(r), int(i))) for r, i in zip(g[0], g[1])]

    mult = {}
    for k in range(1, t + 1):
        num, den = dp.mult_maps(k)
        mult[k] = (up_poly(num), up_poly(den))

    remaining = list(fac)
    keys = []
    while remaining:
        g = remaining.pop(0)
        roots = pf_roots(K, up_poly(g))
        x0 = roots[0]
        xs = []
        for k in range(1, t + 1):
            nk, dk = mult[k]
            dv = pf_eval(K, dk, x0)
            assert dv != K.zero
            xs.append(K.mul(pf_eval(K, nk, x0), K.inv(dv)))
        kp = [K.one]
        for xk in xs:
            kp = pf_mul(K, kp, [K.neg(xk), K.one])
        coeffs = [emb.down(c) for c in kp]
        keys.append(_kernel_key(F2, coeffs))
        keep = []
        for h in remaining:
            hK = up_poly(h)
            if not any(pf_eval(K, hK, xk) == K.zero for xk in xs):
                keep.append(h)
        remaining = keep
    assert len(keys) == ell + 1, (ell, p, len(keys))
    return sorted(keys)


def _aut_xmaps_ss(F2, j, p: int) -> list[tuple]:
    """x-maps x -> c*x + r generating Aut(E)/{+-1} for the chosen models."""
    if p == 3:
        maps = []
        for c in (1, 2):
            for r in (0, 1, 2):
                maps.append((F2.from_int(c), F2.from_int(r)))
        return maps
    if isinstance(j, int) and j % p == 1728 % p and p % 4 == 3:
        return [(F2.one, F2.zero), (F2.from_int(-1), F2.zero)]
    if isinstance(j, int) and j % p == 0 and p % 3 == 2:
        z = F2.sqrt(F2.from_int(-3))
        zeta = F2.smul(pow(2, p - 2, p), F2.add(F2.from_int(-1), z))
        assert F2.mul(zeta, F2.mul(zeta, zeta)) == F2.one and zeta != F2.one
        return [(F2.one, F2.zero), (zeta, F2.zero), (F2.mul(zeta, zeta), F2.zero)]
    return [(F2.one, F2.zero)]


def _transform_key(F2, key, c, r, ell: int) -> tuple:
    """Kernel polynomial of the image subgroup under x -> c*x + r."""
    # K'(X) = c^t * K((X - r)/c), normalized monic
    t = len(key) - 1
    shifted = [F2.zero] * (t + 1)
    # first compute K(Y) with Y = (X - r)/c via synthetic expansion
    cinv = F2.inv(c)
    cur = [F2.one]  # ((X - r)/c)^k incrementally
    acc = [F2.zero] * (t + 1)
    for k, coef in enumerate(key):
        for i, cc in enumerate(cur):
            acc[i] = F2.add(acc[i], F2.mul(coef, cc))
        if k < t:
            nxt = [F2.zero] * (len(cur) + 1)
            for i, cc in enumerate(cur):
                nxt[i] = F2.add(nxt[i], F2.mul(cc, F2.mul(cinv, F2.neg(r))))
                nxt[i + 1] = F2.add(nxt[i + 1], F2.mul(cc, cinv))
            cur = nxt
    lead = acc[t]
    inv = F2.inv(lead)
    return tuple(F2.mul(inv, a) for a in acc)


def count_ss_points(M: int, p: int, twist_models: bool = False) -> SSCount:
    """Points (E, C) with E supersingular mod p and C cyclic of order M,
    counted up to isomorphism (i.e. modulo Aut(E)), with automorphism
    orders of the pairs.  `twist_models` swaps in quadratic twists of the
    working models; counts are model independent.
    """
    if not is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    if M < 1:
        raise ValueError("M must be >= 1")
    if p > COUNT_P_BOUND or M > COUNT_M_BOUND:
        raise TooLarge(f"(M, p) = ({M}, {p}) beyond brute-force bounds")
    if M > 1:
        sf = factor_squarefree(M)
        if M % p == 0:
            raise ValueError("p must not divide M")
        ells = list(sf.primes)
    else:
        ells = []
    if p == 2:
        if M != 1:
            raise TooLarge("level structure in characteristic 2 is not supported")
        return SSCount(total=1, points=(SSPoint(j=0, subgroup_order=1, aut_order=24),))

    ctx, F2 = _f2_field(p)
    rng = random.Random(0xD15C0 ^ (p * 1009 + M))
    points = []
    for j in ss_j_invariants(p):
        if isinstance(j, int):
            a2, a4, a6 = _model_from_j_int(j, p)
            curve = (F2.from_int(a2), F2.from_int(a4), F2.from_int(a6))
        else:
            jf = j
            k = F2.mul(jf, F2.inv(F2.sub(F2.from_int(1728), jf)))
            curve = (F2.zero, F2.smul(3, k), F2.smul(2, k))
        if twist_models:
            # scale (a2, a4, a6) -> (u^2 a2, u^4 a4, u^6 a6) by a nonsquare u^2
            u2 = next(e for e in ([F2.gen] + [F2.add(F2.gen, F2.from_int(i)) for i in range(1, 9)]) if not F2.is_square(e) and e != F2.zero)
            a2c, a4c, a6c = curve
            curve = (
                F2.mul(u2, a2c),
                F2.mul(F2.pow(u2, 2), a4c),
                F2.mul(F2.pow(u2, 3), a6c),
            )
        dp = fq.DivisionPolys(ctx, curve[0], curve[1], curve[2])
        per_ell = []
        for ell in ells:
            per_ell.append(_subgroups_of_level(ctx, F2, dp, ell, p, rng))

        if p == 3:
            aut_group = _aut_xmaps_ss(F2, 0, p)
        else:
            aut_group = _aut_xmaps_ss(F2, j, p)
        if twist_models:
            # x-maps of automorphisms are twist invariant (x scales commute)
            pass

        import itertools

        tuples = list(itertools.product(*per_ell)) if per_ell else [()]
        seen = set()
        for tup in tuples:
            if tup in seen:
                continue
            orbit = set()
            stab = 0
            for c, r in aut_group:
                img = tuple(
                    _transform_key(F2, key, c, r, ell) for key, ell in zip(tup, ells)
                )
                orbit.add(img)
                if img == tup:
                    stab += 1
            seen.update(orbit)
            assert len(orbit) * stab == len(aut_group)
            aut_order = 24 if p == 2 else 2 * stab
            points.append(SSPoint(j=j, subgroup_order=M, aut_order=aut_order))
    return SSCount(total=len(points), points=tuple(points))


# ---------------------------------------------------------------------------
# genus bookkeeping
# ---------------------------------------------------------------------------


def genus_X0(M: int) -> int:
    """Genus of the modular curve of level M (M squarefree here)."""
    sf = factor_squarefree(M) if M > 1 else None
    primes = sf.primes if sf else ()
    mu = 1
    for q in primes:
        mu *= q + 1
    # nu2 = prod(1 + (-1|q)) with the factor at q = 2 equal to 1;
    # nu3 = prod(1 + (-3|q)) with the factor at q = 3 equal to 1
    nu2 = 1
    nu3 = 1
    for q in primes:
        nu2 *= 1 + (kronecker(-1, q) if q != 2 else 0)
        nu3 *= 1 + (kronecker(-3, q) if q != 3 else 0)
    cusps = 2 ** len(primes)
    g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps
    assert g12 % 12 == 0, M
    return g12 // 12


def genus_identity_check(N: int, p: int) -> bool:
    """g(X_0(N)) = 2 g(X_0(N/p)) + n - 1 with n supersingular points mod p."""
    if N % p != 0:
        raise ValueError("p must divide N")
    M = N // p
    n = count_ss_points(M, p).total
    return genus_X0(N) == 2 * genus_X0(M) + n - 1


def has_deg4_aut_point(N: int, p: int) -> bool:
    """Is there a supersingular point of level N/p mod p with an order-4
    automorphism?  Congruence form: p = 3 mod 4 and every odd prime of N/p
    is 1 mod 4 (a factor 2 is allowed)."""
    if N % p != 0 or p == 2:
        raise ValueError("need an odd p dividing N")
    factor_squarefree(N)
    if p % 4 != 3:
        return False
    cof = N // p
    return all(q % 4 == 1 for q in factor_squarefree(cof).primes if q % 2 == 1) if cof > 1 else True


def has_deg4_aut_point_bruteforce(N: int, p: int) -> bool:
    """Same predicate by enumerating (E, C) and their automorphisms."""
    if N % p != 0 or p == 2:
        raise ValueError("need an odd p dividing N")
    cnt = count_ss_points(N // p, p)
    return any(pt.aut_order % 4 == 0 for pt in cnt.points)


# ---------------------------------------------------------------------------
# fixed points of the level-N involution on X_0(N) mod p, by brute force
# ---------------------------------------------------------------------------

WN_N_BOUND = 30
WN_P_BOUND = 50


def _trace_of_curve(a2: int, a4: int, a6: int, p: int) -> int:
    xs = np.arange(p, dtype=np.int64)
    vals = (xs**3 + a2 * xs * xs + a4 * xs + a6) % p
    sq = np.zeros(p, dtype=np.int64)
    sq[np.unique((xs * xs) % p)] = 1
    chi = np.where(vals == 0, 0, np.where(sq[vals] == 1, 1, -1))
    return -int(chi.sum())


def _rational_kernel_polys(ctx, dp: fq.DivisionPolys, ell: int, p: int, rng):
    """Kernel polynomials over F_p of the Galois-stable cyclic ell-subgroups."""
    if ell == 2:
        return [fq.poly(ctx, [-x0, 1]) for x0 in fq.real_roots(ctx, dp.F)]
    psi = fq.monic(ctx, dp.torsion_poly(ell))
    assert fq.is_squarefree(ctx, psi)
    x = fq.xpoly(ctx)
    Xp = fq.powmod(ctx, x, p, psi)
    t = (ell - 1) // 2
    out = []
    for lam in range(1, t + 1):
        num, den = dp.mult_maps(lam)
        cond = fq.sub(ctx, fq.mod(ctx, fq.mul(ctx, Xp, den), psi), fq.mod(ctx, num, psi))
        G = fq.gcd(ctx, psi, cond)
        dG = fq.deg(G)
        if dG == 0:
            continue
        if dG == t:
            out.append(G)
        else:
            assert dG % t == 0, (ell, p, dG)
            out.extend(_split_into_kernel_polys(ctx, dp, G, ell, p, rng))
    # dedupe (scalar Frobenius lands every subgroup in a single lambda)
    uniq = []
    for h in out:
        if not any(fq.eq(h, g) for g in uniq):
            uniq.append(h)
    return uniq


def _split_into_kernel_polys(ctx, dp, G, ell: int, p: int, rng):
    t = (ell - 1) // 2
    factors = fq.factor_squarefree_poly(ctx, G, p, rng)
    degs = [fq.deg(g) for g in factors]
    L = 1
    for d in degs:
        L = L * d // math.gcd(L, d)
    K = GF(p, L) if L > 1 else GF(p, 1)
    mult = {}
    for k in range(1, t + 1):
        num, den = dp.mult_maps(k)
        mult[k] = (
            [K.from_int(int(c)) for c in num[0]],
            [K.from_int(int(c)) for c in den[0]],
        )
    out = []
    remaining = list(factors)
    while remaining:
        g = remaining.pop(0)
        gK = [K.from_int(int(c)) for c in g[0]]
        x0 = pf_roots(K, gK)[0]
        xs = []
        for k in range(1, t + 1):
            nk, dk = mult[k]
            dv = pf_eval(K, dk, x0)
            assert dv != K.zero
            xs.append(K.mul(pf_eval(K, nk, x0), K.inv(dv)))
        kp = [K.one]
        for xk in xs:
            kp = pf_mul(K, kp, [K.neg(xk), K.one])
        coeffs = [K.to_int(c) for c in kp]
        hpoly = fq.poly(ctx, coeffs)
        out.append(hpoly)
        keep = []
        for h in remaining:
            hK = [K.from_int(int(c)) for c in h[0]]
            if not any(pf_eval(K, hK, xk) == K.zero for xk in xs):
                keep.append(h)
        remaining = keep
    return out


def _velu_from_kernel(ctx, curve: tuple[int, int, int], hpoly, p: int, rng):
    """Quotient curve and isogeny x-map for a Galois-stable kernel.

    Returns ((a2', a4', a6'), num, den) with everything over F_p.
    """
    a2, a4, a6 = curve
    factors = fq.factor_squarefree_poly(ctx, fq.monic(ctx, hpoly), p, rng)
    L = 1
    for g in factors:
        d = fq.deg(g)
        L = L * d // math.gcd(L, d)
    K = GF(p, L) if L > 1 else GF(p, 1)
    roots = []
    for g in factors:
        gK = [K.from_int(int(c)) for c in g[0]]
        roots.extend(pf_roots(K, gK))
    assert len(roots) == fq.deg(hpoly)
    hK = [K.one]
    for xq in roots:
        hK = pf_mul(K, hK, [K.neg(xq), K.one])
    b2 = 4 * a2 % p
    t_acc = K.zero
    w_acc = K.zero
    num_acc = [K.zero]
    for xq in roots:
        fxq = pf_eval(K, [K.from_int(a6), K.from_int(a4), K.from_int(a2), K.one], xq)
        gx = K.add(
            K.smul(3, K.mul(xq, xq)), K.add(K.smul(2 * a2 % p, xq), K.from_int(a4))
        )
        two_tor = fxq == K.zero
        tq = gx if two_tor else K.smul(2, gx)
        uq = K.smul(4, fxq)
        t_acc = K.add(t_acc, tq)
        w_acc = K.add(w_acc, K.add(uq, K.mul(xq, tq)))
        # num += tq * (h/(x-xq)) * h + uq * (h/(x-xq))^2
        q1, rem = _pf_div_linear(K, hK, xq)
        assert rem == K.zero
        term = pf_mul(K, [tq], pf_mul(K, q1, hK))
        term = _pf_add(K, term, pf_mul(K, [uq], pf_mul(K, q1, q1)))
        num_acc = _pf_add(K, num_acc, term)
    num_full = _pf_add(K, pf_mul(K, [K.zero, K.one], pf_mul(K, hK, hK)), num_acc)
    den_full = pf_mul(K, hK, hK)
    t_int = K.to_int(t_acc)
    w_int = K.to_int(w_acc)
    a4p = (a4 - 5 * t_int) % p
    a6p = (a6 - b2 * t_int - 7 * w_int) % p
    num = fq.poly(ctx, [K.to_int(c) for c in num_full])
    den = fq.poly(ctx, [K.to_int(c) for c in den_full])
    return (a2, a4p, a6p), num, den


def _pf_add(K, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else K.zero
        b = g[i] if i < len(g) else K.zero
        out.append(K.add(a, b))
    while out and out[-1] == K.zero:
        out.pop()
    return out


def _pf_div_linear(K, f, x0):
    """Divide f by (x - x0): (quotient, remainder)."""
    q = [K.zero] * (len(f) - 1)
    acc = K.zero
    for i in range(len(f) - 1, 0, -1):
        acc = K.add(f[i], K.mul(acc, x0)) if i != len(f) - 1 else f[i]
        q[i - 1] = acc
    rem = K.add(f[0], K.mul(q[0], x0)) if q else f[0]
    return q, rem


def _push_kernel(ctx, hpoly, num, den, p: int, rng):
    """Kernel polynomial of the image of a subgroup under an isogeny x-map.

    The subgroup must be disjoint from the isogeny kernel.
    """
    factors = fq.factor_squarefree_poly(ctx, fq.monic(ctx, hpoly), p, rng)
    L = 1
    for g in factors:
        d = fq.deg(g)
        L = L * d // math.gcd(L, d)
    K = GF(p, L) if L > 1 else GF(p, 1)
    numK = [K.from_int(int(c)) for c in num[0]]
    denK = [K.from_int(int(c)) for c in den[0]]
    imgs = []
    for g in factors:
        gK = [K.from_int(int(c)) for c in g[0]]
        for x0 in pf_roots(K, gK):
            dv = pf_eval(K, denK, x0)
            assert dv != K.zero, "kernel overlap while pushing a subgroup"
            imgs.append(K.mul(pf_eval(K, numK, x0), K.inv(dv)))
    imgs = list(dict.fromkeys(imgs))
    kp = [K.one]
    for xk in imgs:
        kp = pf_mul(K, kp, [K.neg(xk), K.one])
    return fq.poly(ctx, [K.to_int(c) for c in kp])


def _velu_chain(ctx, curve, kernel_polys, p: int, rng):
    """Quotient by a product of prime-order Galois-stable kernels.

    Returns (final curve, num, den) for the composite x-map; the kernels
    must have pairwise coprime orders.
    """
    todo = list(kernel_polys)
    cur = curve
    total_n, total_d = fq.xpoly(ctx), fq.one(ctx)
    for idx in range(len(todo)):
        cur, n1, d1 = _velu_from_kernel(ctx, cur, todo[idx], p, rng)
        for j in range(idx + 1, len(todo)):
            todo[j] = _push_kernel(ctx, todo[j], n1, d1, p, rng)
        D = max(fq.deg(n1), fq.deg(d1))
        total_n, total_d = (
            _compose_rational(ctx, n1, total_n, total_d, D),
            _compose_rational(ctx, d1, total_n, total_d, D),
        )
    return cur, total_n, total_d


def _iso_xmaps(ctx, F2, cur_from, cur_to, p: int):
    """Candidate x-maps x -> c x + r of isomorphisms cur_from -> cur_to
    (coefficients over F_{p^2})."""
    if p == 3:
        out = []
        for c in F2.elements():
            if c == F2.zero:
                continue
            for r in F2.elements():
                if _transforms_to(F2, cur_from, cur_to, c, r, p):
                    out.append((c, r))
        return out
    A1, B1 = cur_from[1] % p, cur_from[2] % p
    A2, B2 = cur_to[1] % p, cur_to[2] % p
    cands = []
    if A1 and B1 and A2 and B2:
        u2 = B2 * A1 % p * pow(B1 * A2 % p, p - 2, p) % p
        cands = [F2.from_int(u2)]
    elif B1 == 0 and B2 == 0 and A1 and A2:
        target = F2.from_int(A2 * pow(A1, p - 2, p) % p)
        s0 = F2.sqrt(target)
        if s0 is not None:
            cands = [s0, F2.neg(s0)]
    elif A1 == 0 and A2 == 0 and B1 and B2:
        target = F2.from_int(B2 * pow(B1, p - 2, p) % p)
        cands = [z for z in F2.elements() if F2.mul(z, F2.mul(z, z)) == target]
    out = []
    for c in cands:
        if c == F2.zero:
            continue
        if _transforms_to(F2, cur_from, cur_to, c, F2.zero, p):
            out.append((c, F2.zero))
    return out


def _transforms_to(F2, cur_from, cur_to, c, r, p: int) -> bool:
    """Does x -> c x + r carry points of cur_from onto cur_to?

    The substitution identity is F_to(c X + r) = c^3 * F_from(X).
    """
    a2, a4, a6 = (F2.from_int(v % p) for v in cur_to)
    Fto = [a6, a4, a2, F2.one]
    comp = [F2.zero]
    cur = [F2.one]
    for k, coef in enumerate(Fto):
        comp = _pf_add(F2, comp, [F2.mul(coef, cc) for cc in cur])
        if k < 3:
            cur = pf_mul(F2, cur, [r, c])
    c3 = F2.mul(c, F2.mul(c, c))
    inv = F2.inv(c3)
    comp = [F2.mul(inv, v) for v in comp]
    b2, b4, b6 = (F2.from_int(v % p) for v in cur_from)
    target = [b6, b4, b2, F2.one]
    comp = comp + [F2.zero] * (4 - len(comp))
    return all(comp[i] == target[i] for i in range(4))


def _compose_rational(ctx, P, n, d, D: int):
    """P(n/d) * d^D as a polynomial; D must be >= deg(P)."""
    coeffs = []
    for i in range(D + 1):
        coeffs.append(
            (
                (int(P[0][i]) if i < len(P[0]) else 0),
                (int(P[1][i]) if i < len(P[1]) else 0),
            )
        )
    dp_pow = fq.one(ctx)
    acc = fq.zero(ctx)
    for i in range(D, -1, -1):
        acc = fq.mul(ctx, acc, n)
        term = fq.smul(ctx, coeffs[i], dp_pow)
        acc = fq.add(ctx, acc, term)
        if i > 0:
            dp_pow = fq.mul(ctx, dp_pow, d)
    return acc


def _compose_pair(ctx, bn, bd):
    """x-map of the square of x -> bn/bd, as a consistent (num, den) pair."""
    D = max(fq.deg(bn), fq.deg(bd))
    return _compose_rational(ctx, bn, bn, bd, D), _compose_rational(ctx, bd, bn, bd, D)


def wN_fixed_point_mod_p(N: int, p: int) -> bool:
    """Does X_0(N) mod p carry an F_p-rational point fixed by the main
    involution?  Pure brute force: sweep curves over F_p, enumerate
    Galois-stable cyclic N-subgroups, quotient by Velu, and test whether
    the quotient pair is isomorphic to the original with the dual kernel
    landing back on the subgroup (equivalently, the composite endomorphism
    squares to an automorphism times [N])."""
    if not is_probable_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    sf = factor_squarefree(N)
    if N < 2 or N > WN_N_BOUND or p > WN_P_BOUND:
        raise TooLarge(f"(N, p) = ({N}, {p}) beyond brute-force bounds")
    if N % p == 0:
        raise ValueError("p must not divide N")
    ells = list(sf.primes)
    ctx, F2 = _f2_field(p)
    rng = random.Random(0xF1CED ^ (N * 911 + p))
    for j in range(p):
        curve = _model_from_j_int(j, p)
        a = _trace_of_curve(*curve, p)
        if a % p == 0:
            if kronecker(-N, p) == 1:
                continue  # no embedding of Q(sqrt(-N)) in the quaternion algebra
        else:
            D = a * a - 4 * p
            if D % N != 0:
                continue
            m = -D // N
            if m <= 0:
                continue
            tt = math.isqrt(m)
            if tt * tt != m:
                continue
        dp = fq.DivisionPolys(ctx, *curve)
        kernels_per_ell = []
        ok = True
        for ell in ells:
            ks = _rational_kernel_polys(ctx, dp, ell, p, rng)
            if not ks:
                ok = False
                break
            kernels_per_ell.append(ks)
        if not ok:
            continue
        import itertools

        numN, denN = dp.mult_maps(N)
        auts = _iso_xmaps(ctx, F2, curve, curve, p)
        for combo in itertools.product(*kernels_per_ell):
            curve2, Xn, Xd = _velu_chain(ctx, curve, list(combo), p, rng)
            try:
                j2 = _j_invariant(*curve2, p)
            except ValueError:
                continue
            if j2 != j % p:
                continue
            isos = _iso_xmaps(ctx, F2, curve2, curve, p)
            if not isos:
                continue
            XnP = fq.poly(ctx, [int(c) for c in Xn[0]])
            XdP = fq.poly(ctx, [int(c) for c in Xd[0]])
            for c, r in isos:
                cc = (int(c[0]), int(c[1]))
                rr = (int(r[0]), int(r[1]))
                bn = fq.add(ctx, fq.smul(ctx, cc, XnP), fq.smul(ctx, rr, XdP))
                bd = XdP
                comp_n, comp_d = _compose_pair(ctx, bn, bd)
                for ca, ra in auts:
                    cca = (int(ca[0]), int(ca[1]))
                    rra = (int(ra[0]), int(ra[1]))
                    rhs_n = fq.add(ctx, fq.smul(ctx, cca, numN), fq.smul(ctx, rra, denN))
                    rhs_d = denN
                    if fq.eq(fq.mul(ctx, comp_n, rhs_d), fq.mul(ctx, rhs_n, comp_d)):
                        return True
    return False


__all__ = [
    "SSCount",
    "SSPoint",
    "count_ss_points",
    "genus_X0",
    "genus_identity_check",
    "has_deg4_aut_point",
    "has_deg4_aut_point_bruteforce",
    "ss_j_invariants",
    "wN_fixed_point_mod_p",
]
