"""Spectral densities of the bending model at b = 0.3: dilute point and one dense point per a."""

import os

import numpy as np

from _common import out_dir, write_csv
from loopmaps.critline import density_on_line, density_v_max, dilute_point, line_points, n_of_b

B = 0.3


def main():
    d = out_dir(__doc__)
    n = n_of_b(B)
    rows = []
    for a in (0.5, 1.0, 2.0):
        points = {"dilute": dilute_point(a, n), "dense": line_points(a, n, 21)[10][1]}
        for label, s in points.items():
            for v in np.linspace(0, density_v_max(s), 301)[1:]:
                x, rho = density_on_line(s, v)
                rows.append((a, label, s.g, s.h, v, x, rho))
    write_csv(os.path.join(d, "density_bending_b0.3.csv"), ("a", "point", "g", "h", "v", "x", "rho"), rows)


if __name__ == "__main__":
    main()
