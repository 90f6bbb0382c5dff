"""Evolution through a multiport and output-event statistics.

Detectors resolve the spatial output port but not the internal (temporal)
mode, so event probabilities are sums of ``|amplitude|^2`` over internal
occupations. Interference between the quadruplet and the double twins needs no
special treatment: they reach the same output Fock states and are summed
coherently before squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import enumerate_events, expand_products, fock_basis, permanent, validate_occupation
from .source import COMPONENTS, N_PORTS, FockState, InternalExpansion, WavepacketSpec, gram_schmidt, input_terms

NOT_TABULATED = None

NORMALIZATION_TOL = 1e-10


def _matrix(u) -> np.ndarray:
    m = np.asarray(u, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def _mode_map(u, n_internal: int) -> np.ndarray:
    # a^dagger_{i,e} -> sum_k U[i, k] b^dagger_{k,e}
    return np.kron(_matrix(u), np.eye(n_internal))


# ---------------------------------------------------------------------------
# Event ordering and closed forms
# ---------------------------------------------------------------------------


def p_distinguishable(s) -> Fraction:
    """Event probability for fully distinguishable photons, ``4! / (4^4 prod s_j!)``."""
    occ = validate_occupation(s, n_modes=4, n_particles=4)
    return Fraction(math.factorial(4), 4**4 * math.prod(math.factorial(c) for c in occ))


def _p_uniform(s) -> Fraction:
    n, m = sum(s), len(s)
    return Fraction(math.factorial(n), m**n * math.prod(math.factorial(c) for c in s))


@lru_cache(maxsize=None)
def _event_order(n_modes: int, n_particles: int) -> tuple[tuple[int, ...], ...]:
    events = enumerate_events(n_modes, n_particles)
    # enumerate_events is already in descending lexicographic order; sort is stable
    return tuple(sorted(events, key=_p_uniform))


def event_order(n_modes: int = 4, n_particles: int = 4) -> list[tuple[int, ...]]:
    """Events sorted by distinguishable-particle probability, rarest first.

    Ties are broken by descending lexicographic order, which gives
    ``s_1 = (4,0,0,0)``, ``s_14 = (0,1,0,3)`` and ``s_35 = (1,1,1,1)``.
    """
    return list(_event_order(n_modes, n_particles))


def event_index(s) -> int:
    """1-based position of ``s`` in :func:`event_order`."""
    return _event_order(4, 4).index(tuple(s)) + 1


def p_indistinguishable_closed(s, alpha: float, phi: float):
    """Tabulated probability for fully indistinguishable photons.

    Only the five events ``(4,0,0,0)``, ``(0,1,0,3)``, ``(0,2,0,2)``,
    ``(0,0,2,2)`` and ``(1,1,1,1)`` have closed forms; any other event returns
    :data:`NOT_TABULATED`.
    """
    s = tuple(s)
    ca, cap = math.cos(alpha), math.cos(alpha + phi)
    if s == (4, 0, 0, 0):
        return math.cos(phi / 2) ** 4 / 8
    if s == (0, 1, 0, 3):
        return 0.0
    if s == (0, 2, 0, 2):
        return (ca + cap) ** 2 / 48
    if s == (0, 0, 2, 2):
        return (1 - 3 * math.cos(2 * alpha + phi)) ** 2 / 48
    if s == (1, 1, 1, 1):
        return (ca - cap) ** 2 / 12
    return NOT_TABULATED


TABULATED_EVENTS = ((4, 0, 0, 0), (0, 1, 0, 3), (0, 2, 0, 2), (0, 0, 2, 2), (1, 1, 1, 1))


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------


def evolve(state: FockState, u) -> FockState:
    """Send every input creation operator through ``u``, keeping its internal label."""
    m = _matrix(u)
    if m.shape[0] != state.n_spatial:
        raise ValueError(f"unitary is {m.shape[0]}x{m.shape[0]} but the state has {state.n_spatial} spatial modes")
    mode_map = _mode_map(m, state.n_internal)
    n_modes, n = state.n_modes, state.n_particles
    terms = []
    for key, amp in state.amplitudes.items():
        if amp == 0:
            continue
        rows = [mode for mode, c in enumerate(key) for _ in range(c)]
        norm = math.sqrt(math.prod(math.factorial(c) for c in key))
        terms.append((amp / norm, mode_map[rows]))
    if not terms:
        return FockState(state.n_spatial, state.n_internal, {})
    vec = expand_products(terms, n_modes, n)
    return FockState.from_vector(vec, state.n_spatial, state.n_internal, n)


def evolve_terms(terms, u, n_internal: int) -> list[tuple[complex, np.ndarray]]:
    """Evolve a state given as products of creation operators (see ``input_terms``)."""
    mode_map = _mode_map(u, n_internal)
    return [(c, forms @ mode_map) for c, forms in terms]


def permanent_cross_check(u, input_occ, output_occ) -> complex:
    """Transition amplitude ``<output| U |input>`` for identical photons.

    Computed as the permanent of ``U`` with row ``i`` repeated ``input_i``
    times and column ``k`` repeated ``output_k`` times, divided by
    ``sqrt(prod input! prod output!)``.
    """
    m = _matrix(u)
    inp = validate_occupation(input_occ, n_modes=m.shape[0])
    out = validate_occupation(output_occ, n_modes=m.shape[0])
    if sum(inp) != sum(out):
        raise ValueError(f"photon number mismatch: {sum(inp)} in, {sum(out)} out")
    rows = [i for i, c in enumerate(inp) for _ in range(c)]
    cols = [k for k, c in enumerate(out) for _ in range(c)]
    norm = math.sqrt(math.prod(math.factorial(c) for c in inp + out))
    return permanent(m[np.ix_(rows, cols)]) / norm


# ---------------------------------------------------------------------------
# Event statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventDistribution:
    """Probabilities of all spatial counting events, in :func:`event_order`."""

    events: tuple[tuple[int, ...], ...]
    probabilities: np.ndarray = field(repr=False)

    def __getitem__(self, s) -> float:
        return float(self.probabilities[self.events.index(tuple(s))])

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(zip(self.events, self.probabilities.tolist()))

    def total(self) -> float:
        return float(self.probabilities.sum())

    def as_dict(self) -> dict:
        return dict(zip(self.events, self.probabilities.tolist()))


@lru_cache(maxsize=None)
def _marginal_index(n_spatial: int, n_internal: int, n_particles: int) -> np.ndarray:
    """Map each Fock basis state to the position of its spatial event in the event order."""
    basis = fock_basis(n_spatial * n_internal, n_particles)
    spatial = basis.states.reshape(len(basis), n_spatial, n_internal).sum(axis=2)
    lookup = {ev: i for i, ev in enumerate(_event_order(n_spatial, n_particles))}
    return np.array([lookup[tuple(s)] for s in spatial.tolist()], dtype=np.int64)


def _distribution(vec, n_spatial: int, n_internal: int, n_particles: int) -> EventDistribution:
    events = _event_order(n_spatial, n_particles)
    idx = _marginal_index(n_spatial, n_internal, n_particles)
    probs = np.bincount(idx, np.abs(vec) ** 2, len(events))
    return EventDistribution(events, probs)


def event_probabilities(output: FockState) -> EventDistribution:
    """Marginalise internal labels incoherently: ``P(s) = sum |amp(s x labels)|^2``."""
    return _distribution(output.to_vector(), output.n_spatial, output.n_internal, output.n_particles)


def output_distribution(exp: InternalExpansion, u, components=COMPONENTS) -> EventDistribution:
    """Event distribution of the down-conversion input state after ``u``.

    Same result as ``event_probabilities(evolve(build_input_state(exp), u))``
    but evolves the three product terms directly, which is much cheaper.
    """
    k = exp.n_internal
    if _matrix(u).shape != (N_PORTS, N_PORTS):
        raise ValueError("the down-conversion source needs a 4x4 unitary")
    terms = evolve_terms(input_terms(exp, components), u, k)
    vec = expand_products(terms, N_PORTS * k, 4)
    return _distribution(vec, N_PORTS, k, 4)


def simulate(spec: WavepacketSpec, u, components=COMPONENTS) -> EventDistribution:
    """Event distribution for photons described by ``spec`` entering ``u``."""
    return output_distribution(gram_schmidt(spec), u, components)
