"""Deterministic low-discrepancy point sets and their randomizations."""
from .faure import default_faure_skip, faure_base, faure_generator_matrix, faure_points, pascal_power_matrix
from .pointset import PointSet, ScrambleSpec, read_points_csv, write_points_csv
from .radical import (PRIMES, digit_expansion, first_primes, halton_points, hammersley_points,
                      radical_inverse, van_der_corput)
from .scramble import apply_scramble
from .sobol import (SobolParams, SobolRecord, build_sobol_matrices, default_params, direction_integers,
                    load_sobol_records, parse_sobol_records, sobol_points)

__all__ = [
    "PRIMES", "PointSet", "ScrambleSpec", "SobolParams", "SobolRecord", "apply_scramble",
    "build_sobol_matrices", "default_faure_skip", "default_params", "digit_expansion",
    "direction_integers", "faure_base", "faure_generator_matrix", "faure_points", "first_primes",
    "halton_points", "hammersley_points", "load_sobol_records", "parse_sobol_records",
    "pascal_power_matrix", "radical_inverse", "read_points_csv", "sobol_points", "van_der_corput",
    "write_points_csv",
]
