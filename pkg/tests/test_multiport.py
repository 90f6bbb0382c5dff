import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourphoton.multiport import (
    UnitaryFileError,
    build_four_port,
    format_unitary,
    load_unitary,
    parse_unitary,
    save_unitary,
    validate,
)

angles = st.floats(-20, 20, allow_nan=False)


def test_four_port_at_zero_phases():
    expected = 0.5 * np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]])
    np.testing.assert_allclose(build_four_port(0, 0).matrix, expected, atol=1e-15)


def test_four_port_rows_literal():
    a, p = 0.7, -1.3
    u = build_four_port(a, p).matrix
    e = np.exp
    np.testing.assert_allclose(u[0], 0.5 * np.array([e(1j * p), e(1j * p), e(1j * (p + a)), e(1j * (p + a))]))
    np.testing.assert_allclose(u[1], 0.5 * np.array([1, 1, -e(1j * a), -e(1j * a)]))


@settings(max_examples=50, deadline=None)
@given(alpha=angles, phi=angles)
def test_four_port_is_complex_hadamard(alpha, phi):
    report = validate(build_four_port(alpha, phi))
    assert report.unitary and report.hadamard
    assert report.max_deviation < 1e-12


@settings(max_examples=30, deadline=None)
@given(alpha=angles, phi=angles)
def test_four_port_periodic_in_phi(alpha, phi):
    a = build_four_port(alpha, phi).matrix
    b = build_four_port(alpha, phi + 2 * math.pi).matrix
    assert np.max(np.abs(a - b)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(alpha=angles, phi=angles)
def test_lower_left_block_is_fixed_and_real(alpha, phi):
    u = build_four_port(alpha, phi).matrix
    np.testing.assert_array_equal(u[2:, :2], 0.5 * np.array([[1, -1], [1, -1]]))


def test_four_port_rejects_non_finite():
    with pytest.raises(ValueError):
        build_four_port(float("nan"), 0)


def test_validate_identity_is_not_hadamard():
    r = validate(np.eye(4))
    assert r.unitary and not r.hadamard


def test_validate_zero_matrix():
    r = validate(np.zeros((4, 4)))
    assert not r.unitary and not r.hadamard


def test_validate_generic_four_port():
    r = validate(build_four_port(0.3, 1.1))
    assert r.unitary and r.hadamard


def test_validate_rejects_non_square():
    with pytest.raises(ValueError):
        validate(np.ones((3, 4)))


def test_load_round_trip(tmp_path):
    path = tmp_path / "u.txt"
    save_unitary(path, build_four_port(0, 0), comment="alpha = phi = 0")
    loaded = load_unitary(path)
    np.testing.assert_allclose(loaded.matrix, build_four_port(0, 0).matrix, atol=0)
    assert loaded.report.unitary and loaded.report.hadamard


def test_round_trip_generic_phases_is_exact():
    u = build_four_port(0.123456789, 2.5).matrix
    assert np.array_equal(parse_unitary(format_unitary(u)).matrix, u)


def test_parse_documented_format():
    text = "# Hadamard\n2\n0.7071067811865476+0j 0.7071067811865476+0j\n0.7071067811865476+0j -0.7071067811865476-0j\n"
    m = parse_unitary(text).matrix
    np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-15)


def test_malformed_row_names_row():
    text = "2\n1+0j 0j\n0j 1+0x\n"
    with pytest.raises(UnitaryFileError, match="row 2") as info:
        parse_unitary(text)
    assert info.value.line == 3
    assert info.value.column == 4


def test_three_by_four_is_dimension_error():
    text = "3\n" + "\n".join(["1 0 0 0"] * 3) + "\n"
    with pytest.raises(UnitaryFileError, match="dimension"):
        parse_unitary(text)


def test_missing_rows_is_dimension_error():
    with pytest.raises(UnitaryFileError, match="dimension"):
        parse_unitary("4\n1 0 0 0\n0 1 0 0\n")


def test_bad_size_line():
    with pytest.raises(UnitaryFileError, match="size") as info:
        parse_unitary("four\n")
    assert info.value.line == 1


def test_non_unitary_rejected():
    with pytest.raises(UnitaryFileError, match="not unitary"):
        parse_unitary("2\n1 1\n0 1\n")


def test_unitarity_threshold_tolerates_text_rounding():
    u = build_four_port(0.4, 0.9).matrix
    text = "4\n" + "\n".join(" ".join(f"{z.real:.10f}{z.imag:+.10f}j" for z in row) for row in u)
    loaded = parse_unitary(text)
    assert 0 < loaded.report.unitary_deviation < 1e-8
