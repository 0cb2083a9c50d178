"""Regenerate ``src/qmcpricing/data/sobol_params.txt``.

The primitive polynomials and initial direction integers are the
Joe & Kuo (2008) ``new-joe-kuo-6.21201`` set, read from the copy that
SciPy bundles with ``scipy.stats.qmc.Sobol``.  Only the first 512
dimensions are written.
"""
import os
import sys

import numpy as np
import scipy.stats._sobol as _sobol

MAX_DIM = 512


def main(out_path):
    npz = np.load(os.path.join(os.path.dirname(_sobol.__file__),
                               "_sobol_direction_numbers.npz"))
    poly, vinit = npz["poly"], npz["vinit"]
    lines = [
        "# Sobol' direction numbers, dimensions 2..%d" % MAX_DIM,
        "# source: Joe & Kuo, new-joe-kuo-6.21201",
        "# columns: dim q a m_1 ... m_q",
        "#   q = degree of the primitive polynomial",
        "#   a = middle coefficients alpha_1..alpha_{q-1}, alpha_1 most significant",
    ]
    for dim in range(2, MAX_DIM + 1):
        p = int(poly[dim - 1])
        q = p.bit_length() - 1
        a = (p >> 1) & ((1 << (q - 1)) - 1) if q > 1 else 0
        m = [int(v) for v in vinit[dim - 1, :q]]
        lines.append(" ".join(str(v) for v in [dim, q, a] + m))
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    default = os.path.join(here, "..", "src", "qmcpricing", "data", "sobol_params.txt")
    main(sys.argv[1] if len(sys.argv) > 1 else default)
