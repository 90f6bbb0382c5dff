import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourphoton.core import (
    enumerate_events,
    expand_product,
    expand_products,
    fock_basis,
    multinomial_norm,
    permanent,
)

from conftest import random_unitary
from oracles import permanent_brute


def test_permanent_identity():
    assert permanent(np.eye(4)) == pytest.approx(1)


def test_permanent_all_ones():
    assert permanent(np.ones((3, 3))) == pytest.approx(6)


def test_permanent_two_by_two():
    assert permanent([[1, 2], [3, 4]]) == pytest.approx(10)


def test_permanent_one_by_one():
    assert permanent([[4.2 - 1j]]) == pytest.approx(4.2 - 1j)


@pytest.mark.parametrize("shape", [(2, 3), (4,), (3, 3, 3)])
def test_permanent_rejects_non_square(shape):
    with pytest.raises(ValueError):
        permanent(np.ones(shape))


def test_permanent_size_cap():
    with pytest.raises(ValueError):
        permanent(np.ones((21, 21)))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_permanent_matches_brute_force(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert permanent(m) == pytest.approx(permanent_brute(m), rel=1e-12, abs=1e-12)


def test_permanent_of_ones_is_factorial():
    for n in range(1, 9):
        assert permanent(np.ones((n, n))).real == pytest.approx(math.factorial(n))


def test_permanent_invariant_under_row_and_column_permutations(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    ref = permanent(m)
    for _ in range(10):
        p = np.eye(4)[rng.permutation(4)]
        q = np.eye(4)[rng.permutation(4)]
        assert permanent(p @ m @ q) == pytest.approx(ref, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(row=st.integers(0, 3), re=st.floats(-3, 3), im=st.floats(-3, 3), seed=st.integers(0, 2**32 - 1))
def test_permanent_multilinear_in_rows(row, re, im, seed):
    r = np.random.default_rng(seed)
    m = r.normal(size=(4, 4)) + 1j * r.normal(size=(4, 4))
    c = complex(re, im)
    scaled = m.copy()
    scaled[row] *= c
    assert permanent(scaled) == pytest.approx(c * permanent(m), rel=1e-10, abs=1e-10)


def test_enumerate_events_four_by_four():
    events = enumerate_events(4, 4)
    assert len(events) == 35


def test_enumerate_events_single_mode():
    assert enumerate_events(1, 7) == [(7,)]


def test_enumerate_events_two_particles():
    assert len(enumerate_events(4, 2)) == 10


def test_enumerate_events_zero_particles():
    assert enumerate_events(3, 0) == [(0, 0, 0)]


@settings(max_examples=30, deadline=None)
@given(n_modes=st.integers(1, 6), n_particles=st.integers(0, 6))
def test_enumerate_events_complete_and_unique(n_modes, n_particles):
    events = enumerate_events(n_modes, n_particles)
    assert len(set(events)) == len(events)
    assert all(sum(e) == n_particles and len(e) == n_modes and min(e) >= 0 for e in events)
    assert len(events) == math.comb(n_particles + n_modes - 1, n_modes - 1)


@pytest.mark.parametrize("v,expected", [((1, 1, 1, 1), 1.0), ((4, 0, 0, 0), math.sqrt(24)), ((2, 2, 0, 0), 2.0)])
def test_multinomial_norm(v, expected):
    assert multinomial_norm(v) == pytest.approx(expected)


def test_multinomial_norm_rejects_negative():
    with pytest.raises(ValueError):
        multinomial_norm((1, -1))


def test_fock_basis_cap():
    with pytest.raises(ValueError):
        fock_basis(2, 9)


def test_expand_product_matches_symbolic_polynomial(rng):
    # (a x0 + b x1)^2 (c x0 + d x1) coefficients checked by hand
    a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
    forms = np.array([[a, b], [a, b], [c, d]])
    basis = fock_basis(2, 3)
    coeffs = dict(zip(map(tuple, basis.states.tolist()), expand_product(forms)))
    assert coeffs[(3, 0)] == pytest.approx(a * a * c)
    assert coeffs[(2, 1)] == pytest.approx(a * a * d + 2 * a * b * c)
    assert coeffs[(1, 2)] == pytest.approx(b * b * c + 2 * a * b * d)
    assert coeffs[(0, 3)] == pytest.approx(b * b * d)


def test_expand_products_identical_photons_give_permanent_amplitudes(rng):
    # amplitude of |out> in prod_i a^dagger(U row i)|0> is perm(U[in, out]) / sqrt(prod out!)
    u = random_unitary(rng)
    amps = expand_products([(1.0, u)], 4, 4)
    basis = fock_basis(4, 4)
    for occ, amp in zip(basis.states.tolist(), amps):
        cols = [k for k, c in enumerate(occ) for _ in range(c)]
        ref = permanent_brute(u[:, cols]) / math.sqrt(math.prod(math.factorial(c) for c in occ))
        assert amp == pytest.approx(ref, abs=1e-12)
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_expand_products_shape_check():
    with pytest.raises(ValueError):
        expand_products([(1.0, np.ones((3, 4)))], 4, 4)
