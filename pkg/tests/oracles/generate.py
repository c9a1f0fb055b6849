"""Independent oracles for values frozen into the test suite.

Run ``python tests/oracles/generate.py``; it prints the numbers that the
tests pin.  Nothing here imports the package.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def midpoint_transform(z_t, delta, a, n):
    """Midpoint sum of Delta0^-2 / (4 pi^2) over the quadratic S box."""
    h = a * delta**2
    edges = [np.linspace(-h, h, n + 1), np.linspace(-0.5, 0.5, n + 1), np.linspace(-h, h, n + 1)]
    mids = [0.5 * (e[1:] + e[:-1]) for e in edges]
    u1, v1, u2 = np.meshgrid(*mids, indexing="ij")
    x1, y1, x2 = z_t
    d = 0.5 * ((u1 - x1) ** 2 + 2j * (u1 * (v1 - y1) + u2 - x2))
    vol = (2 * h) * 1.0 * (2 * h) / n**3
    return np.sum(1.0 / d**2) * vol / (4 * np.pi**2)


def richardson(f, n):
    coarse, fine = f(n), f(2 * n)
    return fine + (fine - coarse) / 3


def sigma_sprime_quad(delta, a):
    g = lambda t: mp.sqrt(1 + t**2)
    return 2 * mp.quad(g, [delta, 2 * delta]) * 1 * (2 * a * delta**2)


def scaled_height(eps, c):
    # smaller root of eps^2 y^2 - 2 y + c = 0
    return mp.findroot(lambda y: eps**2 * y**2 - 2 * y + c, c / 2)


def main():
    a = mp.mpf(1) / 12
    print("transform z=lift(0.1,0,0):", richardson(lambda n: midpoint_transform((0.1, 0, 0), 0.1, 1 / 12, n), 64))
    print("transform z=lift(10,0,0):", richardson(lambda n: midpoint_transform((10, 0, 0), 0.1, 1 / 12, n), 32))
    print("sigma(S') quad delta=0.1:", sigma_sprime_quad(mp.mpf("0.1"), a))
    print("lambda(S) quad delta=0.1:", (2 * a * mp.mpf("0.01")) ** 2 / (4 * mp.pi**2))
    print("scaled height eps=0.1 at (1,0,0):", scaled_height(mp.mpf("0.1"), 1))
    print("power LL density m=1.5 t1=0.01:", mp.mpf(1.5) * 0.5 * mp.mpf("0.01") ** (-0.5) / (8 * mp.pi**2))
    print("power Hessian m=1.5 x1=0.5:", mp.mpf(1.5) * 0.5 * mp.mpf("0.5") ** (-0.5) / 4)
    print("power closed m=1.5 w=(1e-3,0,0) z=(0.1,0,0):",
          0.5 * (mp.mpf("0.1") ** 1.5 - mp.mpf("0.001") ** 1.5 + 1.5 * mp.mpf("0.001") ** 0.5 * (mp.mpf("0.001") - mp.mpf("0.1"))))
    print("graded int |t|^-1/2 on [-c,c], c=a*0.01:", 4 * mp.sqrt(a * mp.mpf("0.01")))
    # mu_{1/3} density, ModelPower m=1.5 at t=(0.01,0,0): sigma = sqrt(1 + (m/2 t1^(m-1))^2)
    t1 = mp.mpf("0.01")
    sig = mp.sqrt(1 + (mp.mpf(1.5) / 2 * t1**0.5) ** 2)
    lam = mp.mpf(1.5) * 0.5 * t1 ** (-0.5) / (8 * mp.pi**2)
    print("mu_1/3 density m=1.5 t1=0.01:", (4 * mp.pi**2 * lam / sig) ** (mp.mpf(1) / 3) * sig)


if __name__ == "__main__":
    main()
