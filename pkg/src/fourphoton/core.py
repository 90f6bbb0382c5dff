"""Permanents, occupation-vector combinatorics and bosonic polynomial expansion.

Everything in this module is a pure function of its inputs. The basis tables
used by :func:`expand_products` are cached per ``(n_modes, n_particles)``.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

MAX_PARTICLES = 8
MAX_PERMANENT_SIZE = 20


def _as_square(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def permanent(m) -> complex:
    """Permanent of a square matrix via Ryser's formula with Gray-code updates.

    Parameters
    ----------
    m : array_like, shape (N, N)
        Square matrix, ``1 <= N <= 20``.

    Returns
    -------
    complex
    """
    a = np.asarray(_as_square(m), dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > MAX_PERMANENT_SIZE:
        raise ValueError(f"permanent limited to N <= {MAX_PERMANENT_SIZE}, got {n}")
    if n == 1:
        return complex(a[0, 0])

    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray_prev = 0
    for k in range(1, 2**n):
        gray = k ^ (k >> 1)
        changed = gray ^ gray_prev
        col = changed.bit_length() - 1
        if gray & changed:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        gray_prev = gray
        sign = -1 if bin(gray).count("1") % 2 else 1
        total += sign * np.prod(row_sums)
    return complex((-1) ** n * total)


def enumerate_events(n_modes: int, n_particles: int) -> list[tuple[int, ...]]:
    """All occupation vectors of ``n_particles`` bosons over ``n_modes`` modes.

    Vectors are returned in descending lexicographic order, so ``(n, 0, ..., 0)``
    comes first.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if n_particles < 0:
        raise ValueError("n_particles must be >= 0")
    events = []
    for combo in combinations_with_replacement(range(n_modes), n_particles):
        occ = [0] * n_modes
        for mode in combo:
            occ[mode] += 1
        events.append(tuple(occ))
    events.sort(reverse=True)
    return events


def multinomial_norm(v) -> float:
    """Fock normalisation ``sqrt(prod_j v_j!)``."""
    counts = [int(c) for c in v]
    if any(c < 0 for c in counts):
        raise ValueError(f"occupation counts must be non-negative: {tuple(v)}")
    return math.sqrt(math.prod(math.factorial(c) for c in counts))


def validate_occupation(v, n_modes: int | None = None, n_particles: int | None = None) -> tuple[int, ...]:
    occ = tuple(int(c) for c in v)
    if any(c < 0 for c in occ):
        raise ValueError(f"occupation counts must be non-negative: {occ}")
    if n_modes is not None and len(occ) != n_modes:
        raise ValueError(f"expected {n_modes} modes, got {len(occ)}")
    if n_particles is not None and sum(occ) != n_particles:
        raise ValueError(f"expected {n_particles} particles, got {sum(occ)}")
    return occ


# ---------------------------------------------------------------------------
# Symmetric (Fock) basis tables
# ---------------------------------------------------------------------------


class FockBasis:
    """Indexing for all ``n_particles``-boson occupation vectors over ``n_modes``.

    Attributes
    ----------
    states : ndarray, shape (dim, n_modes)
        Occupation vectors, one per row.
    norms : ndarray, shape (dim,)
        ``sqrt(prod n!)`` per state.
    raise_table : ndarray, shape (dim_lower, n_modes) or None
        ``raise_table[i, m]`` is the index of ``lower.states[i] + e_m`` in this
        basis, where ``lower`` is the basis with one particle fewer.
    """

    def __init__(self, n_modes: int, n_particles: int):
        if n_particles > MAX_PARTICLES:
            raise ValueError(f"total photon number capped at {MAX_PARTICLES}")
        self.n_modes = n_modes
        self.n_particles = n_particles
        self.states = np.array(enumerate_events(n_modes, n_particles), dtype=np.int64).reshape(-1, n_modes)
        self.index = {tuple(s): i for i, s in enumerate(self.states.tolist())}
        self.norms = np.array([multinomial_norm(s) for s in self.states])
        self.raise_table = None
        if n_particles > 0:
            lower = fock_basis(n_modes, n_particles - 1)
            table = np.empty((len(lower.states), n_modes), dtype=np.int64)
            for i, s in enumerate(lower.states.tolist()):
                for m in range(n_modes):
                    s[m] += 1
                    table[i, m] = self.index[tuple(s)]
                    s[m] -= 1
            self.raise_table = table

    def __len__(self) -> int:
        return len(self.states)


@lru_cache(maxsize=None)
def fock_basis(n_modes: int, n_particles: int) -> FockBasis:
    return FockBasis(n_modes, n_particles)


def expand_product(forms, coeff: complex = 1.0) -> np.ndarray:
    """Monomial coefficients of ``coeff * prod_p (sum_m forms[p, m] x_m)``.

    Returns a vector over ``fock_basis(n_modes, n_particles).states`` holding the
    polynomial coefficients (not yet multiplied by the Fock norms).
    """
    forms = np.asarray(forms, dtype=complex)
    n_particles, n_modes = forms.shape
    poly = np.array([coeff], dtype=complex)
    for p in range(n_particles):
        basis = fock_basis(n_modes, p + 1)
        contrib = (poly[:, None] * forms[p][None, :]).ravel()
        idx = basis.raise_table.ravel()
        poly = np.bincount(idx, contrib.real, len(basis)) + 1j * np.bincount(idx, contrib.imag, len(basis))
    return poly


def expand_products(terms, n_modes: int, n_particles: int) -> np.ndarray:
    """Fock amplitudes of ``sum_t coeff_t * prod_p a^dagger(forms_t[p]) |0>``.

    Parameters
    ----------
    terms : iterable of (coeff, forms)
        ``forms`` has shape ``(n_particles, n_modes)``; each row is a linear
        combination of mode creation operators.

    Returns
    -------
    ndarray
        Amplitudes over ``fock_basis(n_modes, n_particles).states``.
    """
    basis = fock_basis(n_modes, n_particles)
    poly = np.zeros(len(basis), dtype=complex)
    for coeff, forms in terms:
        forms = np.asarray(forms)
        if forms.shape != (n_particles, n_modes):
            raise ValueError(f"forms must have shape {(n_particles, n_modes)}, got {forms.shape}")
        poly += expand_product(forms, coeff)
    return poly * basis.norms
