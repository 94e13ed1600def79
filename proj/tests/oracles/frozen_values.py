"""Independent oracles for values frozen into the C++ unit tests.

Uses mpmath and exact Python integers only; nothing here calls the library.
Run: python3 tests/oracles/frozen_values.py
"""
from fractions import Fraction
import math

import mpmath as mp

mp.mp.prec = 600
GOLD = (mp.sqrt(5) - 1) / 2


def gauss_elements(x, depth):
    out = []
    for _ in range(depth):
        y = 1 / x
        a = int(mp.floor(y))
        out.append(a)
        x = y - a
    return out


def cf_eval(elems, tail):
    t = tail
    for a in reversed(elems):
        t = 1 / (a + t)
    return t


def floor_k_omega(k, w):
    return int(mp.floor(k * w))


def lattice_k(k0, tails, levels):
    """k_L sequence via k_L = -floor(k_{L-1} * omega_L)."""
    ks = [k0]
    for L in range(1, levels + 1):
        ks.append(-floor_k_omega(ks[-1], tails[L]))
    return ks


def K_golden(L):
    Lt = L if L % 2 == 0 else L + 1
    if Lt == 0:
        return 0
    bound = math.ceil(2 / float(GOLD) ** Lt)
    tails = [GOLD] * (Lt + 1)
    best = 0
    for k0 in range(0, bound + 1):
        if lattice_k(k0, tails, Lt)[Lt] == 0:
            best = k0
    return best


def bad_set(L, lam=2):
    M = L // 2
    beta = GOLD ** M
    r = beta * mp.exp(-1 / beta)
    lo, hi = K_golden(M), K_golden(L)
    pts = []
    for k in range(lo + 1, hi + 1):
        lmin = int(mp.ceil(-k / GOLD))
        lmax = int(mp.floor((1 - k) / GOLD))
        for l in range(lmin, lmax + 1):
            c = k + l * GOLD
            if 0 <= c <= 1:
                pts.append(c)
    ivs = sorted((max(mp.mpf(0), c - r), min(mp.mpf(1), c + r)) for c in pts)
    tot, cur_a, cur_b = mp.mpf(0), None, None
    for a, b in ivs:
        if cur_b is None or a > cur_b:
            if cur_b is not None:
                tot += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    if cur_b is not None:
        tot += cur_b - cur_a
    return len(pts), r, tot


def gauge(lam, x):
    e = mp.expjpi(x)
    return mp.matrix([[2 * lam * mp.sinpi(x), -mp.conj(e)], [e, 0]])


def psi(lam, w, s):
    n = int(mp.floor(s / w))
    s0 = s - n * w
    P = mp.eye(2)
    for j in range(n):
        P = gauge(lam, s0 + j * w) * P
    return P


def monodromy(lam, w, x):
    s = w * x
    return (mp.inverse(psi(lam, w, s)) * psi(lam, w, s + 1)).T


def renorm_identity(lam, w, th, k):
    L = mp.eye(2)
    for j in range(k):
        L = gauge(lam, th + j * w) * L
    k1 = int(mp.floor(th + k * w))
    w1, th1 = mp.frac(1 / w), mp.frac(th / w)
    B = mp.eye(2)
    for i in range(1, k1 + 1):
        x = th1 - i * w1
        m = int(mp.floor(x))
        B = B * monodromy(lam, w, x - (m if m % 2 == 0 else m - 1))  # even shift into [0, 2)
    R = psi(lam, w, mp.frac(th + k * w)) * B.T * mp.inverse(psi(lam, w, th))
    return k1, min(mp.mnorm(L - R, "f"), mp.mnorm(L + R, "f")) / mp.mnorm(L, "f")


def lattice_count(w, bound):
    return sum(1 for k in range(1, bound + 1) for l in range(1, int(bound / w) + 2) if k + l * w <= bound)


def main():
    print("pi-3 elements:", gauss_elements(mp.pi - 3, 12))
    print("cf [7,15,1,292]+golden tail:", mp.nstr(cf_eval([7, 15, 1, 292], GOLD), 15))
    print("silver omega_3 (20 twos + golden tail):",
          mp.nstr(cf_eval([2] * 17, GOLD), 15), mp.nstr(mp.sqrt(2) - 1, 15))
    print("ladder golden lambda=2 L=3:", mp.nstr(mp.log(2) / GOLD ** 3, 15))
    s = mp.mpf(1) / 2
    orbit = [s]
    for _ in range(5):
        s = mp.frac(s / GOLD)
        orbit.append(s)
    print("golden s0=1/2 orbit:", [mp.nstr(v, 12) for v in orbit])
    print("cascade theta_1:", mp.nstr(mp.frac(mp.mpf("0.3") / GOLD), 15))
    print("renorm identity golden lambda=2 theta=0.3:",
          [(k, *(lambda r: (r[0], mp.nstr(r[1], 3)))(renorm_identity(2, GOLD, mp.mpf("0.3"), k))) for k in (1, 7, 50, 100)])
    print("monodromy antiperiodicity x=0.37:",
          mp.nstr(mp.mnorm(monodromy(2, GOLD, mp.mpf("1.37")) + monodromy(2, GOLD, mp.mpf("0.37")), "f"), 5))
    print("lattice zeros k+l omega <= 4, <= 7:", lattice_count(GOLD, 4), lattice_count(GOLD, 7))
    print("K golden:", {L: K_golden(L) for L in range(0, 13)})
    a3 = (Fraction(6, 5) ** 210 / 210)
    print("liouville a2:", math.floor(Fraction(6, 5) ** 30 / 30),
          "a3:", a3.numerator // a3.denominator)
    # golden lambda_form(2, 0.1): err_l <= 1/(q_l 2^{0.1 q_l})
    p, q = [0, 1], [1, 1]
    for _ in range(30):
        p.append(p[-1] + p[-2])
        q.append(q[-1] + q[-2])
    holds = []
    for l in range(1, 25):
        err = abs(GOLD - mp.mpf(p[l]) / q[l])
        holds.append((l, q[l], bool(err <= 1 / (q[l] * mp.mpf(2) ** (mp.mpf("0.1") * q[l])))))
    print("golden lambda_form(2,0.1):", holds)
    for L in (4, 6, 8):
        n, r, tot = bad_set(L)
        print(f"badset L={L}: points={n} radius={mp.nstr(r, 12)} measure={mp.nstr(tot, 12)}"
              f" union={mp.nstr(2 * n * r, 12)}")
    # classify theta=1/2 over L in [4,8]
    th = mp.mpf(1) / 2
    for L in range(4, 9):
        M = L // 2
        beta = GOLD ** M
        r = beta * mp.exp(-1 / beta)
        Lt = L if L % 2 == 0 else L + 1
        dmin = mp.inf
        for k in range(K_golden(M) + 1, K_golden(Lt) + 1):
            for l in range(int(mp.ceil(-k / GOLD)), int(mp.floor((1 - k) / GOLD)) + 1):
                dmin = min(dmin, abs(th - k - l * GOLD))
        print(f"theta=1/2 L={L}: min distance {mp.nstr(dmin, 10)} radius {mp.nstr(r, 10)} good={dmin >= r}")


if __name__ == "__main__":
    main()
