"""Photon wavepackets, temporal overlaps and the four-photon down-conversion state.

Ports are labelled 1..4 in the public functions of this module, matching the
physical port numbering. Internally arrays are 0-based.

Each photon entering port ``j`` occupies the Gaussian temporal mode

    |t_j> = int dw f(w) exp(i w t_j) |w>,   |f(w)|^2 ~ exp(-(w - w0)^2 / dw^2)

so that ``<t_j|t_k> = exp(i w0 (t_k - t_j)) exp(-dw^2 (t_j - t_k)^2 / 4)``.
Gram-Schmidt in port order 1, 2, 3, 4 writes ``|t_j> = sum_e L[j, e] |e>``
over an orthonormal internal basis ``|e>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .core import expand_products, fock_basis

SPEED_OF_LIGHT = 299_792_458.0
N_PORTS = 4
# Gram-Schmidt residual norm below which a new internal mode is not opened.
RANK_TOL = 1e-12
# Envelope overlaps below exp(-CLUSTER_GAP^2 / 2) ~ 5e-32 are treated as exactly zero.
CLUSTER_GAP = 12.0

COMPONENTS = ("quadruplet", "twin12", "twin34")


@dataclass(frozen=True)
class WavepacketSpec:
    """Central frequency, spectral width and arrival times of the four photons.

    ``delta_omega`` is the width in the amplitude convention
    ``exp(-(w - w0)^2 / (2 dw^2))``. ``times`` are in seconds and
    ``path_lengths`` in metres, with ``x_j = c t_j``.
    """

    omega0: float
    delta_omega: float
    times: tuple[float, ...]
    lambda0: float | None = None
    delta_lambda_fwhm: float | None = None

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not self.delta_omega > 0:
            raise ValueError(f"delta_omega must be positive, got {self.delta_omega}")
        times = tuple(float(t) for t in self.times)
        if len(times) != N_PORTS:
            raise ValueError(f"expected {N_PORTS} arrival times, got {len(times)}")
        if not all(math.isfinite(t) for t in times):
            raise ValueError("arrival times must be finite")
        object.__setattr__(self, "times", times)

    @property
    def path_lengths(self) -> tuple[float, ...]:
        return tuple(t * SPEED_OF_LIGHT for t in self.times)

    @property
    def coherence_length(self) -> float | None:
        """``lambda0^2 / delta_lambda`` when built from wavelengths, else None."""
        if self.lambda0 is None or self.delta_lambda_fwhm is None:
            return None
        return self.lambda0**2 / self.delta_lambda_fwhm

    def with_times(self, times) -> WavepacketSpec:
        return WavepacketSpec(self.omega0, self.delta_omega, tuple(times), self.lambda0, self.delta_lambda_fwhm)

    def with_path_lengths(self, path_lengths) -> WavepacketSpec:
        return self.with_times(x / SPEED_OF_LIGHT for x in path_lengths)


def wavelength_to_spec(lambda0: float, delta_lambda_fwhm: float, path_lengths=(0.0, 0.0, 0.0, 0.0)) -> WavepacketSpec:
    """Build a :class:`WavepacketSpec` from laboratory wavelength parameters (metres).

    The intensity FWHM in wavelength is converted to the amplitude-Gaussian
    frequency width: ``dw = (2 pi c dlambda / lambda0^2) / (2 sqrt(ln 2))``.
    """
    if not lambda0 > 0:
        raise ValueError(f"lambda0 must be positive, got {lambda0}")
    if not delta_lambda_fwhm > 0:
        raise ValueError(f"delta_lambda_fwhm must be positive, got {delta_lambda_fwhm}")
    omega0 = 2 * math.pi * SPEED_OF_LIGHT / lambda0
    fwhm_omega = 2 * math.pi * SPEED_OF_LIGHT * delta_lambda_fwhm / lambda0**2
    delta_omega = fwhm_omega / (2 * math.sqrt(math.log(2)))
    times = tuple(float(x) / SPEED_OF_LIGHT for x in path_lengths)
    return WavepacketSpec(omega0, delta_omega, times, float(lambda0), float(delta_lambda_fwhm))


def overlap(spec: WavepacketSpec, j: int, k: int) -> complex:
    """Temporal overlap ``<t_j|t_k>`` of the photons in ports ``j`` and ``k`` (1-based)."""
    if j not in range(1, N_PORTS + 1) or k not in range(1, N_PORTS + 1):
        raise ValueError(f"ports must be in 1..{N_PORTS}, got {j}, {k}")
    dt = spec.times[k - 1] - spec.times[j - 1]
    return complex(np.exp(1j * spec.omega0 * dt - 0.25 * (spec.delta_omega * dt) ** 2))


def gram_matrix(spec: WavepacketSpec) -> np.ndarray:
    """Gram matrix ``G[j, k] = <t_k|t_j>`` (0-based), so that ``G = L L^dagger``."""
    t = np.asarray(spec.times)
    dt = t[:, None] - t[None, :]
    return np.exp(1j * spec.omega0 * dt - 0.25 * (spec.delta_omega * dt) ** 2)


@dataclass(frozen=True)
class InternalExpansion:
    """Lower-triangular expansion of the four temporal modes.

    ``coeffs`` has shape ``(4, K)``: row ``j`` gives the components of port
    ``j``'s temporal mode on the ``K`` orthonormal internal modes. Columns are
    only opened for ports whose mode is not spanned by earlier ports, so ``K``
    is the rank of the Gram matrix.
    """

    coeffs: np.ndarray = field(repr=False)
    owners: tuple[int, ...]

    @property
    def n_internal(self) -> int:
        return self.coeffs.shape[1]

    @property
    def gram(self) -> np.ndarray:
        return self.coeffs @ self.coeffs.conj().T

    def full(self) -> np.ndarray:
        """4x4 lower-triangular form with the columns of closed modes zeroed."""
        out = np.zeros((N_PORTS, N_PORTS), dtype=complex)
        out[:, list(self.owners)] = self.coeffs
        return out


def _coherent_amplitudes(beta: float, n_terms: int) -> np.ndarray:
    """Fock amplitudes ``exp(-beta^2/2) beta^n / sqrt(n!)`` of a real coherent state."""
    steps = np.full(n_terms, beta)
    steps[0] = 1.0
    steps[1:] /= np.sqrt(np.arange(1, n_terms))
    return math.exp(-0.5 * beta * beta) * np.cumprod(steps)


def _envelope_vectors(beta) -> np.ndarray:
    """Real column vectors whose inner products are ``exp(-(beta_j - beta_k)^2 / 2)``.

    A Gaussian envelope delayed by ``t`` is the coherent state with
    ``beta = dw t / sqrt(2)``, so these vectors carry exactly the envelope part
    of the temporal overlaps. Working with explicit vectors keeps small
    differences between nearly coincident ports accurate to rounding level;
    the ``1 - |overlap|^2`` form of the same residual loses them below ~1e-8.
    Groups of ports separated by more than ``CLUSTER_GAP`` are placed in
    separate blocks and come out exactly orthogonal.
    """
    beta = np.asarray(beta, dtype=float)
    order = np.argsort(beta, kind="stable")
    clusters = [[order[0]]]
    for prev, cur in zip(order[:-1], order[1:]):
        if beta[cur] - beta[prev] > CLUSTER_GAP:
            clusters.append([])
        clusters[-1].append(cur)
    blocks = []
    for members in clusters:
        shifted = beta[members] - 0.5 * (beta[members].min() + beta[members].max())
        reach = float(np.max(np.abs(shifted)))
        n_terms = int(reach * reach + 12 * reach) + 40
        blocks.append((members, np.stack([_coherent_amplitudes(b, n_terms) for b in shifted], axis=1)))
    out = np.zeros((sum(block.shape[0] for _, block in blocks), beta.size))
    row = 0
    for members, block in blocks:
        out[row : row + block.shape[0], members] = block
        row += block.shape[0]
    return out


def gram_schmidt(spec: WavepacketSpec) -> InternalExpansion:
    """Orthogonalise the temporal modes in port order 1, 2, 3, 4.

    The result is the Cholesky factor of :func:`gram_matrix` with real
    positive diagonal. Carrier phases ``exp(i w0 t)`` are pulled out, and the
    real envelope part is orthogonalised by QR on explicit vectors (see
    :func:`_envelope_vectors`). That keeps tiny but genuine residuals
    accurate, which matters: dropping or misjudging one perturbs the overlaps
    with later ports at first order.

    A port whose residual norm falls below ``RANK_TOL`` opens no new internal
    mode. Its row is renormalised, as is each row after removing the
    sub-``RANK_TOL`` components on modes opened by later ports.
    """
    t = np.asarray(spec.times)
    vecs = _envelope_vectors(spec.delta_omega * (t - t.min()) / math.sqrt(2))
    owners: list[int] = []
    for j in range(N_PORTS):
        if spec.times[j] in spec.times[:j]:
            continue
        r = np.linalg.qr(vecs[:, owners + [j]], mode="r")
        if abs(r[-1, -1]) > RANK_TOL:
            owners.append(j)
    q, r = np.linalg.qr(vecs[:, owners])
    q = q * np.sign(np.diag(r))
    env = vecs.T @ q
    for j in range(N_PORTS):
        env[j, [e for e, k in enumerate(owners) if k > j]] = 0.0
    env /= np.linalg.norm(env, axis=1, keepdims=True)
    coeffs = env * np.exp(1j * spec.omega0 * (t[:, None] - t[owners][None, :]))
    coeffs.setflags(write=False)
    return InternalExpansion(coeffs=coeffs, owners=tuple(owners))


# ---------------------------------------------------------------------------
# Fock states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FockState:
    """Sparse Fock state over ``n_spatial x n_internal`` modes.

    Keys of ``amplitudes`` are occupation tuples of length
    ``n_spatial * n_internal``; mode ``s * n_internal + e`` is spatial mode
    ``s`` with internal label ``e`` (both 0-based).
    """

    n_spatial: int
    n_internal: int
    amplitudes: dict = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.n_spatial * self.n_internal

    @property
    def n_particles(self) -> int:
        for key in self.amplitudes:
            return sum(key)
        return 0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def spatial_occupation(self, key) -> tuple[int, ...]:
        k = self.n_internal
        return tuple(sum(key[s * k : (s + 1) * k]) for s in range(self.n_spatial))

    def to_vector(self) -> np.ndarray:
        basis = fock_basis(self.n_modes, self.n_particles)
        vec = np.zeros(len(basis), dtype=complex)
        for key, amp in self.amplitudes.items():
            vec[basis.index[key]] = amp
        return vec

    @classmethod
    def from_vector(cls, vec, n_spatial: int, n_internal: int, n_particles: int) -> FockState:
        basis = fock_basis(n_spatial * n_internal, n_particles)
        nz = np.flatnonzero(vec)
        states = basis.states[nz].tolist()
        return cls(n_spatial, n_internal, {tuple(s): complex(vec[i]) for s, i in zip(states, nz)})


def photon_forms(exp: InternalExpansion) -> np.ndarray:
    """Linear forms of the four port creation operators over all ``4 K`` modes.

    Row ``j`` is ``a^dagger_{j, t_j}`` written over ``a^dagger_{s, e}``.
    """
    k = exp.n_internal
    forms = np.zeros((N_PORTS, N_PORTS * k), dtype=complex)
    for j in range(N_PORTS):
        forms[j, j * k : (j + 1) * k] = exp.coeffs[j]
    return forms


def input_terms(exp: InternalExpansion, components=COMPONENTS) -> list[tuple[complex, np.ndarray]]:
    """The down-conversion state as a sum of products of creation operators.

    Returns ``(coeff, forms)`` pairs where ``forms`` has one row per photon.
    The quadruplet has weight ``1/sqrt(3)`` and each double twin
    ``1/(2 sqrt(3))``; with a subset of ``components`` the weights are
    rescaled so the state stays normalised.
    """
    unknown = set(components) - set(COMPONENTS)
    if unknown or not components:
        raise ValueError(f"components must be a non-empty subset of {COMPONENTS}")
    f = photon_forms(exp)
    scale = 1 / math.sqrt(len(components))
    rows = {
        "quadruplet": (scale, [0, 1, 2, 3]),
        "twin12": (scale / 2, [0, 0, 1, 1]),
        "twin34": (scale / 2, [2, 2, 3, 3]),
    }
    return [(rows[c][0], f[rows[c][1]]) for c in COMPONENTS if c in components]


def build_input_state(exp: InternalExpansion, components=COMPONENTS) -> FockState:
    """Four-photon state: quadruplet plus the two double twins, equally weighted.

    ``components`` selects a subset for diagnostics, e.g. ``("quadruplet",)``.
    """
    k = exp.n_internal
    vec = expand_products(input_terms(exp, components), N_PORTS * k, 4)
    return FockState.from_vector(vec, N_PORTS, k, 4)


# ---------------------------------------------------------------------------
# Distinguishability settings
# ---------------------------------------------------------------------------


def canonical_pattern(labels) -> tuple[int, ...]:
    """Restricted-growth form of a labelling: first label 1, new labels count up.

    >>> canonical_pattern((1, 1, 3, 4))
    (1, 1, 2, 3)
    """
    seen: dict = {}
    out = []
    for lab in labels:
        if lab not in seen:
            seen[lab] = len(seen) + 1
        out.append(seen[lab])
    return tuple(out)


def display_label(pattern) -> tuple[int, ...]:
    """Label every photon by the (1-based) position of the first photon in its group.

    ``(1, 1, 2, 3)`` becomes ``(1, 1, 3, 4)``, the usual ``{1,1,3,4}`` notation.
    """
    first: dict = {}
    return tuple(first.setdefault(lab, i + 1) for i, lab in enumerate(pattern))


def format_pattern(pattern) -> str:
    return "{" + ",".join(str(i) for i in display_label(canonical_pattern(pattern))) + "}"


def set_partitions(n: int = 4) -> list[tuple[int, ...]]:
    """All restricted-growth strings of length ``n`` (15 for ``n = 4``)."""
    out = [(1,)]
    for _ in range(n - 1):
        out = [p + (lab,) for p in out for lab in range(1, max(p) + 2)]
    return sorted(out)


ALL_PATTERNS = tuple(set_partitions(4))


@dataclass(frozen=True)
class SettingWeights:
    """Weights of the distinguishability settings, keyed by canonical pattern."""

    weights: dict

    def __getitem__(self, pattern) -> float:
        return self.weights.get(canonical_pattern(pattern), 0.0)

    def total(self) -> float:
        return sum(self.weights.values())

    def dominant(self) -> tuple[int, ...]:
        return max(self.weights, key=self.weights.get)

    def labelled(self) -> dict[str, float]:
        return {format_pattern(p): self.weights.get(p, 0.0) for p in ALL_PATTERNS}


def setting_weights(exp: InternalExpansion, level: str = "port") -> SettingWeights:
    """Decompose the input state into distinguishability settings.

    ``level="port"`` expands the product of the four port modes over the
    internal basis (the ``4! = 24`` Gram-Schmidt terms) and groups ports that
    share an internal mode. ``level="photon"`` expands the full
    quadruplet-plus-twins Fock state and groups all four photons, identified
    by (port, copy), by internal label; in the distinguishable limit the
    double twins then land in ``{1,1,3,3}``-type pair patterns.
    """
    weights = dict.fromkeys(ALL_PATTERNS, 0.0)
    if level == "port":
        prob = np.abs(exp.coeffs) ** 2
        k = exp.n_internal
        for labels in product(range(k), repeat=N_PORTS):
            w = math.prod(prob[j, e] for j, e in enumerate(labels))
            if w:
                weights[canonical_pattern(labels)] += w
    elif level == "photon":
        state = build_input_state(exp)
        k = state.n_internal
        for key, amp in state.amplitudes.items():
            labels = []
            for s in range(N_PORTS):
                for e in range(k):
                    labels.extend([e] * key[s * k + e])
            weights[canonical_pattern(labels)] += abs(amp) ** 2
    else:
        raise ValueError(f"level must be 'port' or 'photon', got {level!r}")
    return SettingWeights(weights)
