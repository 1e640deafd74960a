"""Twisting model spectral densities at b = 0.3, at the dilute point and one dense point."""

import os

import numpy as np

from _common import out_dir, write_csv
from loopmaps.twistline import n_twist, twist_critical_line, twist_density


def main():
    d = out_dir(__doc__)
    line = twist_critical_line(n_twist(0.3))
    rows = []
    for label, s in (("dilute", line[0]), ("dense", line[len(line) // 2])):
        for v in np.linspace(0, 14, 301)[1:]:
            x, rho = twist_density(s, v)
            # the density is even: emit both branches
            rows.append((label, s.g, s.h2, v, x, rho))
            rows.append((label, s.g, s.h2, v, -x, rho))
    write_csv(os.path.join(d, "twist_density_b0.3.csv"), ("point", "g", "h2", "v", "x", "rho"), rows)


if __name__ == "__main__":
    main()
