"""Extended-precision reference values frozen into the C++ unit tests.

Every quantity here is recomputed from first principles with mpmath and
plain bisection; nothing calls into the library under test.
Run: python3 tests/oracles/reference_values.py
"""
import mpmath as mp

mp.mp.dps = 40


def bisect(g, lo, hi, iters=200):
    glo = g(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        gm = g(mid)
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return (lo + hi) / 2


def kepler_u(ell, e):
    return bisect(lambda u: u - e * mp.sin(u) - ell, ell - e, ell + e)


def eta_exact(e):
    lbar = (1 + 3 * e**2 + mp.mpf(3) / 8 * e**4) / (1 - e**2) ** mp.mpf(4.5)
    nbar = (1 + mp.mpf(15) / 2 * e**2 + mp.mpf(45) / 8 * e**4 + mp.mpf(5) / 16 * e**6) / (1 - e**2) ** 6
    return nbar / lbar


def coeffs(e):
    a2 = mp.mpf(1) / 2 - mp.mpf(5) / 4 * e**2 + mp.mpf(13) / 32 * e**4
    a3 = mp.mpf(7) / 4 * e - mp.mpf(123) / 32 * e**3
    a4 = mp.mpf(17) / 4 * e**2 - mp.mpf(115) / 12 * e**4
    return a2, a3, a4


def omega_normalized(Y, eps, e):
    Y, eps, e = mp.mpf(Y), mp.mpf(eps), mp.mpf(e)
    return (Y - eps**2 / (8 * (Y - 1) ** 3)
            + eps**2 * (e**2 / 8 * (5 / (Y - 1) ** 3 + 98 / (3 - 2 * Y) ** 3)
                        + e**4 / 64 * (-63 / (Y - 1) ** 3 + 3444 / (2 * Y - 3) ** 3 - 578 / (Y - 2) ** 3)
                        + e**6 / 768 * (31280 / (Y - 2) ** 3 + 390 / (Y - 1) ** 3 + 45387 / (3 - 2 * Y) ** 3)))


def main():
    ell, e = mp.mpf(1), mp.mpf("0.2056")
    print("kepler u(1, 0.2056)      =", mp.nstr(kepler_u(ell, e), 20))

    ell = mp.pi / 2
    u = kepler_u(ell, e)
    r = 1 - e * mp.cos(u)
    f = 2 * mp.atan(mp.sqrt((1 + e) / (1 - e)) * mp.tan(u / 2))
    print("orbit r(pi/2, 0.2056)    =", mp.nstr(r, 20))
    print("orbit f(pi/2, 0.2056)    =", mp.nstr(f, 20))

    for ee in ("0.1", "0.2"):
        print(f"potential_coeffs({ee})   =", [mp.nstr(c, 20) for c in coeffs(mp.mpf(ee))])

    print("eta_exact(0.2056)        =", mp.nstr(eta_exact(mp.mpf("0.2056")), 20))
    print("eta_exact(0.285)         =", mp.nstr(eta_exact(mp.mpf("0.285")), 20))
    print("eta_exact(0.1)           =", mp.nstr(eta_exact(mp.mpf("0.1")), 20))

    print("Omega(1.2, 1e-3, 0)      =", mp.nstr(omega_normalized("1.2", "1e-3", 0), 20))
    print("Omega(1.3, 1e-3, 0.1)    =", mp.nstr(omega_normalized("1.3", "1e-3", "0.1"), 20))

    gamma = (mp.sqrt(5) - 1) / 2
    print("approximant(3,2,50,+)    =", mp.nstr(mp.mpf(3) / 2 + 1 / (50 + gamma), 20))
    for p, k in ((2, 50), (2, 100)):
        for sgn in (+1, -1):
            w = p + sgn / (k + gamma)
            root = bisect(lambda x: eta_exact(x) - w, mp.mpf("0.2"), mp.mpf("0.5"))
            print(f"root eta_exact(e)=2{'+' if sgn > 0 else '-'}1/({k}+g) =", mp.nstr(root, 20))
    print("root eta_exact(e)=2      =", mp.nstr(bisect(lambda x: eta_exact(x) - 2, mp.mpf("0.2"), mp.mpf("0.5")), 20))
    w = 2 - 1 / (100 + gamma)
    print("root eta_exact(e)=2-1/(100+g) =", mp.nstr(bisect(lambda x: eta_exact(x) - w, mp.mpf("0.2"), mp.mpf("0.5")), 20))


if __name__ == "__main__":
    main()


def write_u1_golden(path):
    """u_1 for omega0 = 1 + 1/(50+gamma), e = 0.1, mu = 1e-3 from the real-form inversion
    of S_1 = -V_x = -2 sum_j A_j sin(2 theta - n_j t)."""
    gamma = (mp.sqrt(5) - 1) / 2
    w = 1 + 1 / (50 + gamma)
    mu = mp.mpf("1e-3")
    a = coeffs(mp.mpf("0.1"))
    lines = []
    for amp, n in zip(a, (2, 3, 4)):
        s = -2 * amp
        d = 2 * w - n
        den = d * (d * d + mu * mu)
        c_coef = -(s * mu) / den
        s_coef = -(s * d) / den
        lines.append("2 %d %s %s" % (-n, mp.nstr(c_coef, 20, min_fixed=1, max_fixed=0),
                                     mp.nstr(s_coef, 20, min_fixed=1, max_fixed=0)))
    with open(path, "w") as f:
        f.write("\n".join(sorted(lines, key=lambda l: int(l.split()[1]))) + "\n")


if __name__ == "__main__":
    import os
    write_u1_golden(os.path.join(os.path.dirname(__file__), "..", "data", "u1_omega50_e0.1_mu1e-3.txt"))
