"""High-precision reference values used by the regression tests.

Run with `python3 tools/oracles.py`; requires mpmath.
"""
from mpmath import mp, mpf, quad, quadosc, sqrt, pi, inf, findroot, ellipfun, sin, cos, cosh

mp.dps = 30


def energy(x, y):
    return y**2 / 2 + x**2 / 2 - x**4 / 4


def poly(e, v):
    return 2 * e - v**2 + v**4 / 2


def quad_r(x, y):
    e = energy(x, y)
    lo = abs(x) if y == 0 else x * (1 if y > 0 else -1)
    return quad(lambda v: 1 / sqrt(poly(e, v)), [lo, lo + 1, inf])


def quad_s(x, y):
    e = energy(x, y)
    a = sqrt(1 + sqrt(1 - 4 * e))
    f = lambda v: 1 / sqrt(poly(e, v))
    # rounding at the turning point can leave a tiny imaginary part
    return (quad(f, [a, abs(x)]) + quad(f, [a, a + 1, inf])).real


def total_by_energy(e):
    return 2 * quad(lambda v: 1 / sqrt(poly(e, v)), [0, 1, inf])


def boundary_tplus(x):
    return sqrt(2) * quad(lambda w: 1 / sqrt(x**2 * (cosh(w) ** 2 + 1) - 2), [0, 1, inf])


def kappa(nu):
    # power-law parts on [R, ∞) in closed form, pure oscillations by quadosc
    a = -4 + 2 * nu
    g = lambda s: (sin(s) - s * cos(s)) ** 2 * s**a
    n = 20
    big_r = n * pi
    core = quad(g, [0] + [k * pi for k in range(1, n + 1)])
    power = -(big_r ** (a + 1)) / (a + 1) / 2 - big_r ** (a + 3) / (a + 3) / 2
    osc = quadosc(
        lambda s: -(s**a) * cos(2 * s) / 2 - s ** (a + 1) * sin(2 * s) + s ** (a + 2) * cos(2 * s) / 2,
        [big_r, inf],
        omega=2,
    )
    return 128 * pi**3 * (core + power + osc)


def main():
    e_inf = findroot(lambda e: total_by_energy(e) - pi, (mpf("0.26"), mpf("2")), solver="anderson")
    x_c = findroot(lambda x: boundary_tplus(x) - pi, (mpf("1.01"), mpf("1.2")), solver="anderson")
    beta0 = findroot(lambda y: quad_r(mpf(0), y) - pi, (mpf("0.8"), mpf("1.0")), solver="anderson")
    beta_half = findroot(lambda y: quad_r(mpf("0.5"), y) - pi, (mpf("0.6"), mpf("0.7")), solver="anderson")
    beta_two = findroot(lambda y: quad_s(mpf(2), y) - pi, (mpf("-2.1"), mpf("-2.05")), solver="anderson")
    rows = [
        ("E_INFINITY", e_inf),
        ("X_CRITICAL", x_c),
        ("BETA_AT_0", beta0),
        ("BETA_AT_HALF", beta_half),
        ("BETA_AT_2", beta_two),
        ("S_MINUS2_1", quad_s(mpf(-2), mpf(1))),
        ("TOTAL_LIFESPAN_E_MINUS_1_5", quad_s(mpf(2), mpf(-1)) + quad_r(mpf(2), mpf(1))),
        ("BOUNDARY_TPLUS_1_2", boundary_tplus(mpf("1.2"))),
        ("SN_0_8_HALF", ellipfun("sn", mpf("0.8"), m=mpf("0.5"))),
    ]
    for k in range(5):
        rows.append((f"KAPPA_{k}", kappa(mpf(k) / 10)))
    for name, v in rows:
        print(f"pub const {name}: f64 = {mp.nstr(v, 20)};")


if __name__ == "__main__":
    main()
