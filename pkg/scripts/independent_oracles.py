"""Frozen test oracles computed without the package's own differentiation.

Derivatives come from sympy on the real coordinates (x1, y1, x2, y2); radial
solves and the umbilic root come from mpmath at 30 digits.  The printed
values are pasted into the tests.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
x1, y1, x2, y2 = sp.symbols("x1 y1 x2 y2", real=True)
z1, z2 = x1 + sp.I * y1, x2 + sp.I * y2
COORDS = [(x1, y1), (x2, y2)]


def wirtinger(f, k, bar):
    x, y = COORDS[k]
    return (sp.diff(f, x) + (1 if bar else -1) * sp.I * sp.diff(f, y)) / 2


def beltrami(r):
    r1, r2 = wirtinger(r, 0, 0), wirtinger(r, 1, 0)
    r1b, r2b = wirtinger(r, 0, 1), wirtinger(r, 1, 1)
    r11, r12, r22 = wirtinger(r1, 0, 0), wirtinger(r1, 1, 0), wirtinger(r2, 1, 0)
    r11b, r12b = wirtinger(r1, 0, 1), wirtinger(r1, 1, 1)
    r21b, r22b = wirtinger(r2, 0, 1), wirtinger(r2, 1, 1)
    n = sp.Matrix([[0, r1, r2], [r1, r11, r12], [r2, r12, r22]]).det()
    d = sp.Matrix([[0, r1, r2], [r1b, r11b, r21b], [r2b, r12b, r22b]]).det()
    args = (x1, y1, x2, y2)
    return sp.lambdify(args, -n / d, "mpmath"), sp.lambdify(args, r, "mpmath")


def abs2(z):
    return z * sp.conjugate(z)


def chart_radius(rf, zeta, guess=0.8):
    return mp.findroot(lambda s: rf(zeta.real * s, zeta.imag * s, s, 0), guess)


def main():
    eps = sp.Rational(1, 20)
    r = sp.expand(abs2(z1) + abs2(z2) - 1 + eps * sp.re(z1 ** 2 * sp.conjugate(z2) ** 2))
    b, rf = beltrami(r)

    def b_chart(zeta):
        s = chart_radius(rf, zeta)
        return b(zeta.real * s, zeta.imag * s, s, 0)

    root = mp.findroot(lambda u, v: [mp.re(b_chart(mp.mpc(u, v))), mp.im(b_chart(mp.mpc(u, v)))],
                       (0.69, 0.72))
    print("deformed_sphere(0.05) umbilic zeta:", root[0], root[1])
    zeta = mp.mpc(0.5, 0.25)
    print("deformed_sphere(0.05) s(0.5+0.25i):", chart_radius(rf, zeta))
    print("deformed_sphere(0.05) b(0.5+0.25i):", b_chart(zeta))

    rb = sp.expand((abs2(z1) + abs2(z2)) ** 2 + abs2(z1) ** 2 + abs2(z2) ** 2 - 2)
    bb, rbf = beltrami(rb)
    zeta = mp.mpc(0.3, -0.2)
    s = chart_radius(rbf, zeta)
    print("bulge s(0.3-0.2i):", s)
    print("bulge b(0.3-0.2i):", bb(zeta.real * s, zeta.imag * s, s, 0))
    print("lp(3) s(1):", mp.mpf(2) ** (-mp.mpf(1) / 3))


if __name__ == "__main__":
    main()
