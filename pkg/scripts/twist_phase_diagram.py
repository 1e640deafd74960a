"""Twisting model at b = 0.3: critical segment, full parabola and the positivity bound."""

import math
import os

import numpy as np

from _common import out_dir, write_csv
from loopmaps.twistline import (
    n_twist,
    twist_critical_line,
    twist_parabola,
    twist_positivity_bound,
)

B = 0.3


def main():
    d = out_dir(__doc__)
    n = n_twist(B)
    line = twist_critical_line(n, points=200)
    write_csv(os.path.join(d, "twist_line_b0.3.csv"), ("h2", "g", "kappa_2mb", "phase"),
              [(s.h2, s.g, s.kappa_2mb, s.phase) for s in line])
    h_end = B / (4 * math.sqrt(1 - n * n))
    hs = np.linspace(0, h_end, 200)
    write_csv(os.path.join(d, "twist_parabola_b0.3.csv"), ("h2", "g_parabola", "g_bound"),
              [(h, twist_parabola(n, h), twist_positivity_bound(n, h)) for h in hs])
    # n = 0: the segment ends with a vertical tangent at (1/12, 1/16)
    line0 = twist_critical_line(1e-12, points=200)
    write_csv(os.path.join(d, "twist_line_n0.csv"), ("h2", "g", "kappa_2mb", "phase"),
              [(s.h2, s.g, s.kappa_2mb, s.phase) for s in line0])


if __name__ == "__main__":
    main()
