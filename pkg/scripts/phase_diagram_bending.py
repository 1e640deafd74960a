"""Non-generic critical lines of the bending model at b = 0.3 for a = 0.5, 1, 2, with dilute ends."""

import os

from _common import out_dir, write_csv
from loopmaps.critline import dilute_point, line_points, n_of_b

B = 0.3
A_VALUES = (0.5, 1.0, 2.0)


def main():
    d = out_dir(__doc__)
    n = n_of_b(B)
    rows, ends = [], []
    for a in A_VALUES:
        for param, s in line_points(a, n, 200):
            rows.append((a, param, s.g, s.h, s.kappa_2mb, s.phase))
        e = dilute_point(a, n)
        ends.append((a, e.g, e.h))
    write_csv(os.path.join(d, "phase_diagram_bending_b0.3.csv"),
              ("a", "param", "g", "h", "kappa_2mb", "phase"), rows)
    write_csv(os.path.join(d, "dilute_points_bending_b0.3.csv"), ("a", "g", "h"), ends)


if __name__ == "__main__":
    main()
