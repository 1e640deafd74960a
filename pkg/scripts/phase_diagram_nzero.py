"""n -> 0 critical lines of the bending model from the closed forms, a = 0.5, 1, 2."""

import os

import numpy as np
from scipy import optimize

from _common import out_dir, write_csv
from loopmaps.critline import (
    SIGMA_STAR,
    critical_line_a1,
    nzero_dilute_point,
    nzero_line_c,
    rho_g0_a1,
    sigma_of_c,
)


def _c_end(a):
    c0 = (1 - a) / a
    step = 1e-2 if a > 1 else -1e-2
    hi = c0 + step / 1e4
    while sigma_of_c(a, hi) < SIGMA_STAR:
        hi += step
    return optimize.brentq(lambda c: sigma_of_c(a, c) - SIGMA_STAR, min(c0, hi), max(c0, hi), xtol=1e-15)


def main():
    d = out_dir(__doc__)
    rows = []
    for a in (0.5, 2.0):
        c0, c1 = (1 - a) / a, _c_end(a)
        for c in np.linspace(c0, c1, 200)[:-1]:
            g, h = nzero_line_c(a, c)
            rows.append((a, c, g, h, sigma_of_c(a, c)))
        g, h = nzero_dilute_point(a)
        rows.append((a, c1, g, h, SIGMA_STAR))
    sig = lambda r: 2 * (1 - r / 2) ** 2 / (2 - 2 * r + 0.75 * r * r)
    r0 = rho_g0_a1(0.0)
    r1 = optimize.brentq(lambda r: sig(r) - SIGMA_STAR, 1.0, r0 - 1e-12, xtol=1e-14)
    for r in np.linspace(r0, r1, 200)[:-1]:
        g, h = critical_line_a1(0.0, r)
        rows.append((1.0, r, g, h, sig(r)))
    g, h = nzero_dilute_point(1.0)
    rows.append((1.0, r1, g, h, SIGMA_STAR))
    write_csv(os.path.join(d, "phase_diagram_bending_n0.csv"), ("a", "param", "g", "h", "sigma"), rows)


if __name__ == "__main__":
    main()
