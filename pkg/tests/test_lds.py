import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

from qmcpricing.lds import (PRIMES, PointSet, ScrambleSpec, SobolRecord, apply_scramble, build_sobol_matrices,
                            default_faure_skip, default_params, digit_expansion, faure_base,
                            faure_generator_matrix, faure_points, halton_points, hammersley_points,
                            load_sobol_records, parse_sobol_records, pascal_power_matrix, radical_inverse,
                            read_points_csv, sobol_points, van_der_corput)
from qmcpricing.lds.sobol import direction_integers

from helpers import balanced


def exact_radical_inverse(omega, b):
    """Independent oracle: exact rational digit reflection."""
    x, scale = Fraction(0), Fraction(1, b)
    while omega:
        omega, a = divmod(omega, b)
        x += a * scale
        scale /= b
    return x


# ---------------------------------------------------------------- radical inverse


@pytest.mark.parametrize("omega,b,expected", [(1, 2, 0.5), (3, 2, 0.75), (6, 5, 0.24)])
def test_radical_inverse_examples(omega, b, expected):
    assert radical_inverse(omega, b) == pytest.approx(expected, abs=1e-15)


def test_radical_inverse_exact_in_base_two():
    for omega in [1, 5, 12345, 2 ** 40 + 7, 2 ** 52 - 1]:
        assert radical_inverse(omega, 2) == float(exact_radical_inverse(omega, 2))


def test_radical_inverse_origin_needs_flag():
    with pytest.raises(ValueError, match="origin"):
        radical_inverse(0, 2)
    assert radical_inverse(0, 2, include_origin=True) == 0.0


def test_digit_expansion_round_trip():
    for omega, b in [(0, 3), (1, 2), (624, 5), (10 ** 8 + 17, 101)]:
        digits = digit_expansion(omega, b)
        assert all(0 <= a < b for a in digits)
        assert sum(a * b ** k for k, a in enumerate(digits)) == omega
        assert not digits or digits[-1] != 0


# ---------------------------------------------------------------- van der corput / halton / hammersley


def test_van_der_corput_examples():
    assert van_der_corput(4, 2, 0).coords.ravel().tolist() == [0.5, 0.25, 0.75, 0.125]
    assert van_der_corput(1, 2, 2).coords.ravel().tolist() == [0.75]
    assert van_der_corput(1, 3, 0).coords[0, 0] == pytest.approx(1 / 3, abs=1e-16)


def test_van_der_corput_matches_radical_inverse_with_skip():
    pts = van_der_corput(50, 7, skip=11).coords.ravel()
    oracle = [float(exact_radical_inverse(11 + j + 1, 7)) for j in range(50)]
    np.testing.assert_allclose(pts, oracle, rtol=0, atol=1e-15)


def test_halton_first_point():
    np.testing.assert_allclose(halton_points(1, 3).coords, [[0.5, 1 / 3, 0.2]], atol=1e-16)


def test_halton_one_dimension_is_vdc():
    assert halton_points(2, 1).coords.ravel().tolist() == [0.5, 0.25]


def test_halton_51_points_in_three_dimensions():
    pts = halton_points(51, 3).coords
    assert pts.shape == (51, 3)
    for j in range(51):
        for i, b in enumerate((2, 3, 5)):
            assert pts[j, i] == pytest.approx(float(exact_radical_inverse(j + 1, b)), abs=1e-15)


def test_halton_dimension_cap():
    halton_points(2, 512)
    with pytest.raises(ValueError, match="512"):
        halton_points(2, 513)


def test_primes_table():
    assert PRIMES[:6] == (2, 3, 5, 7, 11, 13)
    assert len(PRIMES) > 512
    assert all(all(p % q for q in range(2, int(math.isqrt(p)) + 1)) for p in PRIMES)


def test_hammersley_examples():
    np.testing.assert_array_equal(hammersley_points(2, 2).coords, [[0.25, 0.5], [0.75, 0.25]])
    np.testing.assert_array_equal(hammersley_points(4, 2).coords[:, 0], [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_array_equal(hammersley_points(1, 2).coords, [[0.5, 0.5]])
    with pytest.raises(ValueError, match="van_der_corput"):
        hammersley_points(4, 1)


# ---------------------------------------------------------------- faure


@pytest.mark.parametrize("d,b", [(1, 2), (2, 2), (5, 5), (6, 7), (70, 71), (100, 101)])
def test_faure_base(d, b):
    assert faure_base(d) == b


def test_faure_default_skip_is_b_to_the_fourth():
    assert default_faure_skip(5) == 625


def faure_digit_formula(omega, i, b, depth=16):
    """Independent oracle: the binomial digit formula evaluated with exact integers."""
    a = digit_expansion(omega, b)
    x = Fraction(0)
    for m in range(1, depth + 1):
        y = sum(math.comb(k, m - 1) * (i - 1) ** (k - m + 1) * ak
                for k, ak in enumerate(a) if k >= m - 1) % b
        x += Fraction(y, b ** m)
    return x


def test_faure_first_coordinate_is_radical_inverse():
    pts = faure_points(30, 3, skip=0).coords
    for j in range(30):
        assert pts[j, 0] == pytest.approx(float(exact_radical_inverse(j + 1, 3)), abs=1e-15)


def test_faure_one_dimension_is_vdc_base_two():
    np.testing.assert_array_equal(faure_points(40, 1, skip=0).coords, van_der_corput(40, 2, 0).coords)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_faure_matrix_matches_digit_formula(d):
    b = faure_base(d)
    omegas = list(range(1, b ** 4 + 1, max(1, b ** 4 // 97)))
    pts = faure_points(b ** 4, d, skip=0).coords
    for omega in omegas:
        for i in range(1, d + 1):
            assert pts[omega - 1, i - 1] == pytest.approx(float(faure_digit_formula(omega, i, b)), abs=1e-15)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
def test_faure_formula_equals_pascal_powers(d):
    b = faure_base(d)
    for i in range(1, d + 1):
        np.testing.assert_array_equal(faure_generator_matrix(i, b, 16), pascal_power_matrix(i, b, 16))


def test_faure_four_points_balanced_from_origin():
    pts = faure_points(4, 2, skip=0, include_origin=True).coords
    assert balanced(pts, 2, 2)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_faure_net_balance_on_aligned_blocks(d, m):
    b = faure_base(d)
    # indices b^4 .. b^4 + b^m - 1: the block right after the default burn-in
    pts = faure_points(b ** m, d, skip=b ** 4 - 1).coords
    assert balanced(pts, b, m)


def test_faure_skip_default():
    assert faure_points(3, 5).skip == 625


# ---------------------------------------------------------------- sobol parameters


def test_sobol_coordinate_one_is_identity():
    params = build_sobol_matrices(load_sobol_records(), 1, depth=4)
    np.testing.assert_array_equal(params.generator_matrix(1), np.eye(4, dtype=np.uint8))


def test_sobol_recurrence_hand_example():
    rec = SobolRecord(dim=2, degree=1, a=0, m=(1,))
    assert direction_integers(rec, 3) == [1, 3, 5]


def test_sobol_recurrence_degree_three():
    # x^3 + x + 1: a = 0b01, so mu_j = 4 mu_{j-2} ^ 8 mu_{j-3} ^ mu_{j-3}
    rec = SobolRecord(dim=4, degree=3, a=1, m=(1, 3, 1))
    mu = direction_integers(rec, 6)
    assert mu[3] == 5
    for j in range(4, 7):
        assert mu[j - 1] == (4 * mu[j - 3]) ^ (8 * mu[j - 4]) ^ mu[j - 4]


def test_all_shipped_dimensions_give_odd_bounded_direction_integers():
    params = build_sobol_matrices(load_sobol_records(), 512, depth=32)
    for mu in params.mu:
        for j, m in enumerate(mu, 1):
            assert m % 2 == 1 and m < 2 ** j


def test_generator_matrices_are_unit_upper_triangular():
    params = default_params(16)
    for i in range(1, 17):
        g = params.generator_matrix(i)
        assert np.all(np.diag(g) == 1)
        assert not np.any(np.tril(g, -1))


def test_sobol_validation_errors():
    with pytest.raises(ValueError, match=r"dimension 3.*m_2"):
        build_sobol_matrices(parse_sobol_records("2 1 0 1\n3 2 1 1 2\n"), 3)
    with pytest.raises(ValueError, match=r"dimension 3.*m_2"):
        build_sobol_matrices(parse_sobol_records("2 1 0 1\n3 2 1 1 5\n"), 3)
    with pytest.raises(ValueError, match="dimension 4"):
        build_sobol_matrices(parse_sobol_records("2 1 0 1\n3 2 1 1 3\n"), 4)


def test_parse_sobol_records_comments_and_errors():
    text = "# header\n\n2 1 0 1\n# dim q a m\n3 2 1 1 3\n"
    recs = parse_sobol_records(text)
    assert recs[3] == SobolRecord(3, 2, 1, (1, 3))
    with pytest.raises(ValueError, match="needs 2 initial values"):
        parse_sobol_records("3 2 1 1\n")


def test_params_file_override(tmp_path, monkeypatch):
    path = tmp_path / "params.txt"
    path.write_text("2 1 0 1\n")
    monkeypatch.setenv("QMC_SOBOL_PARAMS", str(path))
    recs = load_sobol_records()
    assert list(recs) == [2]


# ---------------------------------------------------------------- sobol points


def test_sobol_first_coordinate_is_vdc():
    pts = sobol_points(4, 3, skip=0).coords
    assert pts[:, 0].tolist() == [0.5, 0.25, 0.75, 0.125]


def test_sobol_matches_bit_matrix_product():
    params = default_params(8)
    pts = sobol_points(300, 8, skip=256).coords
    for row, omega in zip(pts[::37], range(257, 557, 37)):
        a = np.array([(omega >> k) & 1 for k in range(32)])
        for i in range(1, 9):
            y = params.generator_matrix(i).astype(np.int64) @ a % 2
            assert row[i - 1] == sum(int(bit) * 2.0 ** -(r + 1) for r, bit in enumerate(y))


@pytest.mark.parametrize("k", range(1, 11))
def test_sobol_net_balance(k):
    for start in (1, 3):
        # indices start*2^k .. (start+1)*2^k - 1
        pts = sobol_points(2 ** k, 16, skip=start * 2 ** k - 1).coords
        assert balanced(pts, 2, k)


def test_sobol_index_overflow():
    params = build_sobol_matrices(None, 2, depth=8)
    sobol_points(254, 2, skip=1, params=params)
    with pytest.raises(ValueError, match="overflows"):
        sobol_points(255, 2, skip=1, params=params)


def test_sobol_default_skip():
    assert sobol_points(4, 2).skip == 256
    np.testing.assert_array_equal(sobol_points(4, 2).coords, sobol_points(260, 2, skip=0).coords[256:])


# ---------------------------------------------------------------- scrambling


def test_scramble_none_is_identity():
    pts = sobol_points(64, 4)
    assert apply_scramble(pts, ScrambleSpec("none", 99)) is pts


def test_digital_shift_of_origin_is_the_shift():
    origin = sobol_points(1, 3, skip=0, include_origin=True)
    spec = ScrambleSpec("digital-shift", 1234)
    shifted = apply_scramble(origin, spec).coords[0]
    # XOR with the same shift maps every point; shift(0) = s, shift(x) = x ^ s
    other = apply_scramble(sobol_points(5, 3, skip=0, include_origin=True), spec).coords
    raw = sobol_points(5, 3, skip=0, include_origin=True).coords
    for i in range(3):
        s = int(shifted[i] * 2 ** 32)
        assert np.all((raw[:, i] * 2 ** 32).astype(np.uint64) ^ np.uint64(s)
                      == (other[:, i] * 2 ** 32).astype(np.uint64))


def test_unknown_scramble_mode():
    with pytest.raises(ValueError, match="unknown scramble mode"):
        ScrambleSpec("rotate")
    with pytest.raises(ValueError, match="depth"):
        ScrambleSpec("owen", 1, depth=0)


def test_scramble_depth_below_native_rejected():
    with pytest.raises(ValueError, match="native depth"):
        sobol_points(8, 2, scramble=ScrambleSpec("nested-uniform", 1, depth=16))


@pytest.mark.parametrize("seed", [0, 1, 2, 17, 2 ** 63 + 5])
def test_owen_scrambled_sobol_keeps_net_balance(seed):
    spec = ScrambleSpec("nested-uniform", seed)
    for k in (1, 4, 7, 10):
        pts = sobol_points(2 ** k, 16, skip=2 ** k - 1, scramble=spec).coords
        assert balanced(pts, 2, k)


@pytest.mark.parametrize("seed", [0, 3, 11])
def test_owen_scrambled_faure_keeps_net_balance(seed):
    spec = ScrambleSpec("nested-uniform", seed)
    for d in (2, 3, 5):
        b = faure_base(d)
        for m in (1, 2, 3):
            pts = faure_points(b ** m, d, skip=b ** 4 - 1, scramble=spec).coords
            assert balanced(pts, b, m)


def test_digital_shift_faure_keeps_net_balance():
    pts = faure_points(125, 5, skip=624, scramble=ScrambleSpec("digital-shift", 8)).coords
    assert balanced(pts, 5, 3)


def test_owen_scramble_first_point_uniform_over_seeds():
    first = np.array([sobol_points(1, 1, scramble=ScrambleSpec("nested-uniform", s)).coords[0, 0]
                      for s in range(256)])
    counts = np.bincount((first * 16).astype(int), minlength=16)
    stat = float(np.sum((counts - 16) ** 2) / 16)
    assert chi2.sf(stat, 15) > 0.001


def test_scrambling_needs_digit_source():
    with pytest.raises(ValueError, match="digit expansion"):
        apply_scramble(hammersley_points(8, 2), ScrambleSpec("owen", 1))


def test_apply_scramble_matches_direct_generation():
    spec = ScrambleSpec("nested-uniform", 42)
    a = apply_scramble(halton_points(20, 4), spec).coords
    b = halton_points(20, 4, scramble=spec).coords
    np.testing.assert_array_equal(a, b)
    c = apply_scramble(lambda scramble: sobol_points(16, 3, scramble=scramble), spec)
    np.testing.assert_array_equal(c.coords, sobol_points(16, 3, scramble=spec).coords)


# ---------------------------------------------------------------- properties


families = st.sampled_from(["sobol", "faure", "halton", "vdc"])
modes = st.sampled_from(["none", "digital-shift", "nested-uniform"])


def _make(family, n, d, skip, mode, seed):
    spec = ScrambleSpec(mode, seed)
    if family == "sobol":
        return sobol_points(n, d, skip=skip, scramble=spec)
    if family == "faure":
        return faure_points(n, d, skip=skip, scramble=spec)
    if family == "halton":
        return halton_points(n, d, skip=skip, scramble=spec)
    return van_der_corput(n, 3, skip=skip, scramble=spec)


@settings(max_examples=60, deadline=None)
@given(families, st.integers(1, 40), st.integers(1, 6), st.integers(0, 700), modes,
       st.integers(0, 2 ** 64 - 1))
def test_points_deterministic_and_in_unit_cube(family, n, d, skip, mode, seed):
    a = _make(family, n, d, skip, mode, seed)
    b = _make(family, n, d, skip, mode, seed)
    assert a.coords.tobytes() == b.coords.tobytes()
    assert np.all(a.coords >= 0) and np.all(a.coords < 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32))
def test_owen_scramble_top_bit_is_a_permutation_of_halves(d, seed):
    pts = sobol_points(2, d, skip=1, scramble=ScrambleSpec("nested-uniform", seed)).coords
    assert np.all((pts[0] < 0.5) != (pts[1] < 0.5))


def test_partitioned_generation_equals_sequential():
    spec = ScrambleSpec("nested-uniform", 9)
    whole = sobol_points(1000, 6, skip=256, scramble=spec).coords
    parts = np.vstack([sobol_points(250, 6, skip=256 + 250 * k, scramble=spec).coords for k in range(4)])
    np.testing.assert_array_equal(whole, parts)


def test_point_csv_round_trip(tmp_path):
    pts = faure_points(30, 3, scramble=ScrambleSpec("owen", 5))
    path = tmp_path / "pts.csv"
    pts.to_csv(path)
    assert path.read_text().splitlines()[0] == "x1,x2,x3"
    back = read_points_csv(path)
    assert back.coords.tobytes() == pts.coords.tobytes()


def test_pointset_rejects_out_of_range():
    with pytest.raises(ValueError, match=r"\[0, 1\)"):
        PointSet(np.array([[0.5, 1.0]]), "file")


def test_scramble_none_argument_means_unscrambled():
    for make in (lambda s: sobol_points(8, 2, scramble=s), lambda s: faure_points(8, 2, scramble=s),
                 lambda s: halton_points(8, 2, scramble=s), lambda s: van_der_corput(8, 2, scramble=s)):
        pts = make(None)
        assert not pts.scramble.active
        np.testing.assert_array_equal(pts.coords, make(ScrambleSpec("none")).coords)


def test_sobol_matches_reference_engine():
    from scipy.stats import qmc
    # the reference runs in Gray-code order, which permutes points within each aligned 2^k block
    ref = qmc.Sobol(d=40, scramble=False).random(2048)
    ours = sobol_points(2048, 40, skip=0, include_origin=True).coords
    for k in (1, 5, 11):
        n = 2 ** k
        np.testing.assert_array_equal(np.unique(ours[:n], axis=0), np.unique(ref[:n], axis=0))
