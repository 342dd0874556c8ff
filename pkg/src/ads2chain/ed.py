"""Exact diagonalization on the full ``2^N`` qubit space, block by charge sector.

Basis convention: the computational state ``|b_1 b_2 ... b_N>`` has index
``sum_n b_n 2^(N-n)`` (site 1 is the most significant bit), ``Z|0> = |0>`` and
``Z|1> = -|1>``. An occupied fermion site is ``b_n = 0``, so the sector with
``k`` particles holds the patterns with ``N - k`` set bits.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy import sparse

from .model import SpinHamiltonian

__all__ = [
    "DEFAULT_CAP",
    "EngineCapError",
    "ChargeSector",
    "SpectrumResult",
    "StateVector",
    "enumerate_sectors",
    "sector_for_state",
    "sector_matrix",
    "full_matrix",
    "eigensolve",
    "ground_and_first_excited",
    "LowLying",
    "ground_state",
    "expectation",
    "z_profile",
    "entanglement_entropy",
    "embed",
    "basis_state",
    "neel_state",
    "evolve",
    "evolve_series",
    "observable_series",
    "otoc",
]

log = logging.getLogger(__name__)

DEFAULT_CAP = 16
_DEGENERACY_TOL = 1e-10


class EngineCapError(ValueError):
    """Requested system is above the exact-diagonalization size cap."""


def _check_cap(n: int, cap: int):
    if n > cap:
        raise EngineCapError(f"N={n} exceeds the exact-diagonalization cap {cap}")


@dataclass(frozen=True)
class ChargeSector:
    """Fixed-particle-number block.

    ``charge_label`` is the eigenvalue of ``a Q_flat``, i.e. ``(2k - N)/2``
    for ``k`` particles (the staggered offset vanishes for even ``N``).
    """

    num_sites: int
    particles: int
    basis: np.ndarray = field(repr=False)

    @property
    def charge_label(self) -> float:
        return (2 * self.particles - self.num_sites) / 2.0

    @property
    def size(self) -> int:
        return len(self.basis)

    def index_of(self, patterns: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.basis, patterns)
        idx = np.minimum(idx, len(self.basis) - 1)
        bad = self.basis[idx] != patterns
        if np.any(bad):
            raise ValueError("pattern outside this charge sector")
        return idx


def _popcounts(n: int) -> np.ndarray:
    states = np.arange(2**n, dtype=np.int64)
    counts = np.zeros(2**n, dtype=np.int64)
    for b in range(n):
        counts += (states >> b) & 1
    return counts


def enumerate_sectors(n: int, cap: int = DEFAULT_CAP) -> list[ChargeSector]:
    """All ``N + 1`` sectors ordered by particle number ``k = 0..N``."""
    _check_cap(n, cap)
    counts = _popcounts(n)
    states = np.arange(2**n, dtype=np.int64)
    sectors = []
    for k in range(n + 1):
        basis = states[counts == n - k]
        assert len(basis) == comb(n, k)
        sectors.append(ChargeSector(n, k, basis))
    return sectors


def sector_for_state(n: int, pattern: int) -> ChargeSector:
    k = n - bin(int(pattern)).count("1")
    return enumerate_sectors(n)[k]


def _apply_string(factors, n: int, patterns: np.ndarray):
    """Image patterns and complex amplitudes of one Pauli string."""
    flip = 0
    phase = np.ones(len(patterns), dtype=complex)
    for site, axis in factors:
        bit = (patterns >> (n - site)) & 1
        if axis == "Z":
            phase *= 1 - 2 * bit
        elif axis == "X":
            flip |= 1 << (n - site)
        else:  # Y|0> = i|1>, Y|1> = -i|0>
            flip |= 1 << (n - site)
            phase *= 1j * (1 - 2 * bit)
    return patterns ^ flip, phase


def sector_matrix(op: SpinHamiltonian, sector: ChargeSector) -> np.ndarray:
    """Dense matrix of ``op`` inside ``sector``.

    Raises ``ValueError`` if some string leaks out of the sector, which can
    only happen for an operator that does not conserve the flat charge.
    """
    n = op.num_sites
    if n != sector.num_sites:
        raise ValueError("operator and sector live on different chains")
    dim = sector.size
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    mat[cols, cols] += op.constant
    # individual strings (X X, Y Y, ...) leave the sector; only their sums
    # conserve charge, so leaked amplitude is collected and checked at the end
    leaked_keys, leaked_vals = [], []
    for term in op.terms:
        images, amps = _apply_string(term.factors, n, sector.basis)
        pos = np.minimum(np.searchsorted(sector.basis, images), dim - 1)
        inside = sector.basis[pos] == images
        vals = term.coefficient * amps
        np.add.at(mat, (pos[inside], cols[inside]), vals[inside])
        if not inside.all():
            leaked_keys.append(images[~inside] * dim + cols[~inside])
            leaked_vals.append(vals[~inside])
    if leaked_keys:
        keys, inv = np.unique(np.concatenate(leaked_keys), return_inverse=True)
        net = np.zeros(len(keys), dtype=complex)
        np.add.at(net, inv, np.concatenate(leaked_vals))
        if np.abs(net).max() > 1e-12:
            raise ValueError("operator connects different charge sectors")
    return mat


def full_matrix(op: SpinHamiltonian, cap: int = DEFAULT_CAP) -> sparse.csr_matrix:
    """Sparse matrix of ``op`` on the whole space (any operator, conserving or not)."""
    n = op.num_sites
    _check_cap(n, cap)
    dim = 2**n
    cols = np.arange(dim, dtype=np.int64)
    rows_all, cols_all, vals_all = [cols], [cols], [np.full(dim, op.constant, dtype=complex)]
    for term in op.terms:
        images, amps = _apply_string(term.factors, n, cols)
        rows_all.append(images)
        cols_all.append(cols)
        vals_all.append(term.coefficient * amps)
    mat = sparse.coo_matrix((np.concatenate(vals_all),
                             (np.concatenate(rows_all), np.concatenate(cols_all))),
                            shape=(dim, dim))
    return mat.tocsr()


@dataclass
class SpectrumResult:
    """Eigenvalues sorted ascending with their sector labels.

    ``sector_eigs`` / ``sector_vecs`` keep the per-sector decomposition keyed
    by particle number; ``sectors`` maps the same keys to :class:`ChargeSector`.
    """

    eigenvalues: np.ndarray
    sector_labels: np.ndarray
    sectors: dict
    sector_eigs: dict
    sector_vecs: dict | None = None

    def levels_by_charge(self) -> dict:
        return {self.sectors[k].charge_label: v for k, v in self.sector_eigs.items()}


def eigensolve(H: SpinHamiltonian, vectors: bool = True, cap: int = DEFAULT_CAP,
               particles: Sequence[int] | None = None) -> SpectrumResult:
    """Diagonalize every (or the listed) charge sector with a dense solver."""
    sectors = {s.particles: s for s in enumerate_sectors(H.num_sites, cap)}
    if particles is not None:
        sectors = {k: sectors[k] for k in particles}
    eigs, vecs = {}, {} if vectors else None
    for k, sec in sectors.items():
        mat = sector_matrix(H, sec)
        if vectors:
            w, v = np.linalg.eigh(mat)
            vecs[k] = v
        else:
            w = np.linalg.eigvalsh(mat)
        eigs[k] = w
    all_e = np.concatenate([eigs[k] for k in sectors])
    labels = np.concatenate([np.full(len(eigs[k]), sectors[k].charge_label) for k in sectors])
    order = np.lexsort((labels, all_e))
    return SpectrumResult(all_e[order], labels[order], sectors, eigs, vecs)


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over a sector basis, or over the full space if ``sector`` is None."""

    amplitudes: np.ndarray
    num_sites: int
    sector: ChargeSector | None = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        nrm = np.linalg.norm(amp)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm={nrm})")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def basis_tag(self) -> str:
        return "full" if self.sector is None else f"k={self.sector.particles}"

    def full(self) -> np.ndarray:
        return embed(self)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.full(), other.full()))


def embed(state: StateVector) -> np.ndarray:
    if state.sector is None:
        return state.amplitudes
    out = np.zeros(2**state.num_sites, dtype=complex)
    out[state.sector.basis] = state.amplitudes
    return out


def basis_state(n: int, bits: Sequence[int] | str) -> StateVector:
    """Computational state, e.g. ``basis_state(4, "0101")``, in its sector basis."""
    bits = [int(b) for b in bits]
    if len(bits) != n:
        raise ValueError("need one bit per site")
    pattern = int("".join(map(str, bits)), 2)
    sec = sector_for_state(n, pattern)
    amp = np.zeros(sec.size, dtype=complex)
    amp[sec.index_of(np.array([pattern]))[0]] = 1.0
    return StateVector(amp, n, sec)


def neel_state(n: int) -> StateVector:
    """``|0101...01>``: occupied odd sites."""
    return basis_state(n, "01" * (n // 2))


@dataclass
class LowLying:
    e0: float
    e1: float
    ground: StateVector
    first: StateVector
    labels: tuple
    degenerate: bool


def ground_and_first_excited(H: SpinHamiltonian, cap: int = DEFAULT_CAP,
                             spectrum: SpectrumResult | None = None,
                             particles: Sequence[int] | None = None) -> LowLying:
    """Global lowest and second-lowest levels (possibly in different sectors).

    Exact ties are broken by ascending charge label; ``degenerate`` flags them.
    Without a precomputed ``spectrum`` only the two lowest eigenpairs of each
    sector are computed; ``particles`` restricts the search to given sectors.
    """
    picks = []
    if spectrum is not None:
        for k, w in spectrum.sector_eigs.items():
            for j in range(min(2, len(w))):
                picks.append((w[j], spectrum.sectors[k].charge_label, k,
                              spectrum.sector_vecs[k][:, j]))
        sectors = spectrum.sectors
    else:
        sectors = {s.particles: s for s in enumerate_sectors(H.num_sites, cap)}
        if particles is not None:
            sectors = {k: sectors[k] for k in particles}
        for k, sec in sectors.items():
            mat = sector_matrix(H, sec)
            top = min(2, sec.size) - 1
            w, v = sla.eigh(mat, subset_by_index=[0, top])
            for j in range(top + 1):
                picks.append((w[j], sec.charge_label, k, v[:, j]))
    if len(picks) < 2:
        raise ValueError("need at least two levels")
    picks.sort(key=lambda p: (p[0], p[1]))
    (e0, q0, k0, v0), (e1, q1, k1, v1) = picks[0], picks[1]
    ground = StateVector(v0, H.num_sites, sectors[k0])
    first = StateVector(v1, H.num_sites, sectors[k1])
    deg = abs(e1 - e0) < _DEGENERACY_TOL * max(1.0, abs(e0))
    return LowLying(float(e0), float(e1), ground, first, (q0, q1), deg)


def ground_state(H: SpinHamiltonian, particles: int | None = None,
                 cap: int = DEFAULT_CAP) -> StateVector:
    """Lowest eigenvector, optionally searched only in the ``particles`` sector."""
    ks = None if particles is None else [particles]
    if ks is not None and particles in (0, H.num_sites):
        sec = enumerate_sectors(H.num_sites, cap)[particles]
        return StateVector(np.ones(1, dtype=complex), H.num_sites, sec)
    return ground_and_first_excited(H, cap, particles=ks).ground


def expectation(state: StateVector, op: SpinHamiltonian, imag_tol: float = 1e-10) -> float:
    """``<psi|O|psi>`` for a Hermitian observable."""
    if state.sector is not None:
        try:
            mat = sector_matrix(op, state.sector)
            val = np.vdot(state.amplitudes, mat @ state.amplitudes)
        except ValueError:
            psi = embed(state)
            val = np.vdot(psi, full_matrix(op) @ psi)
    else:
        psi = state.amplitudes
        val = np.vdot(psi, full_matrix(op) @ psi)
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return float(val.real)


def z_profile(state: StateVector) -> np.ndarray:
    """``<Z_n>`` for ``n = 1..N``."""
    n = state.num_sites
    if state.sector is not None:
        probs = np.abs(state.amplitudes) ** 2
        patterns = state.sector.basis
    else:
        probs = np.abs(state.amplitudes) ** 2
        patterns = np.arange(2**n, dtype=np.int64)
    out = np.empty(n)
    for site in range(1, n + 1):
        bit = (patterns >> (n - site)) & 1
        out[site - 1] = np.sum(probs * (1 - 2 * bit))
    return out


def entanglement_entropy(state: StateVector, cut: int) -> float:
    """Von Neumann entropy (natural log) of sites ``1..cut``."""
    n = state.num_sites
    if not 1 <= cut < n:
        raise ValueError(f"cut must satisfy 1 <= cut < {n}")
    psi = embed(state).reshape(2**cut, 2 ** (n - cut))
    s = sla.svdvals(psi)
    p = s**2
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


# --------------------------------------------------------------------------
# dynamics


@dataclass
class _Propagator:
    energies: np.ndarray
    vectors: np.ndarray
    sector: ChargeSector | None


def _propagator(H: SpinHamiltonian, state: StateVector, cap: int) -> _Propagator:
    if state.sector is not None:
        mat = sector_matrix(H, state.sector)
    else:
        _check_cap(H.num_sites, cap)
        mat = full_matrix(H, cap).toarray()
    w, v = np.linalg.eigh(mat)
    return _Propagator(w, v, state.sector)


def evolve_series(state: StateVector, H: SpinHamiltonian, times: Sequence[float],
                  cap: int = DEFAULT_CAP) -> list[StateVector]:
    """``exp(-iHt)|psi>`` at each time via one eigendecomposition."""
    prop = _propagator(H, state, cap)
    coeffs = prop.vectors.conj().T @ state.amplitudes
    out = []
    for t in np.asarray(times, dtype=float):
        amp = prop.vectors @ (np.exp(-1j * prop.energies * t) * coeffs)
        out.append(StateVector(amp, state.num_sites, state.sector))
    return out


def observable_series(state: StateVector, H: SpinHamiltonian, ops, times: Sequence[float],
                      cap: int = DEFAULT_CAP, check_norm: bool = True) -> np.ndarray:
    """``<psi(t)|O|psi(t)>`` for each observable in ``ops`` (rows) and time (columns).

    Works in the eigenbasis of ``H`` so each time point costs one
    matrix-vector product per observable.
    """
    if isinstance(ops, SpinHamiltonian):
        ops = [ops]
    prop = _propagator(H, state, cap)
    v = prop.vectors
    coeffs = v.conj().T @ state.amplitudes
    mats = []
    for op in ops:
        m = sector_matrix(op, state.sector) if state.sector is not None else \
            full_matrix(op, cap).toarray()
        mats.append(v.conj().T @ m @ v)
    times = np.asarray(times, dtype=float)
    out = np.empty((len(mats), len(times)))
    for n_t, t in enumerate(times):
        c = np.exp(-1j * prop.energies * t) * coeffs
        if check_norm and abs(np.vdot(c, c).real - 1.0) > 1e-10:
            raise RuntimeError("norm drift during evolution")
        for n_o, m in enumerate(mats):
            val = np.vdot(c, m @ c)
            if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
                raise ValueError("observable expectation is not real; non-Hermitian operator?")
            out[n_o, n_t] = val.real
    return out


def evolve(state: StateVector, H: SpinHamiltonian, t: float,
           cap: int = DEFAULT_CAP) -> StateVector:
    return evolve_series(state, H, [t], cap)[0]


_OTOC_CHUNK = 256


def otoc(H: SpinHamiltonian, i: int, j: int, times: Sequence[float],
         state: StateVector | None = None, reference: str = "ground",
         cap: int = DEFAULT_CAP) -> np.ndarray:
    """``C_ij(t) = <kappa_i kappa_j(t) kappa_i kappa_j(t)>``, complex per time.

    ``reference="ground"`` uses the global ground state (or ``state`` when
    given); ``"infinite"`` takes the normalized trace over the full space.
    Bond operators conserve the flat charge, so the trace splits by sector.
    """
    from .model import operator_kappa

    geom = H.geometry
    ki, kj = operator_kappa(geom, i), operator_kappa(geom, j)
    times = np.asarray(times, dtype=float)

    if reference == "infinite":
        total = np.zeros(len(times), dtype=complex)
        for sec in enumerate_sectors(H.num_sites, cap):
            total += _otoc_trace(H, ki, kj, sec, times)
        return total / 2**H.num_sites
    if reference != "ground":
        raise ValueError(f"unknown OTOC reference {reference!r}")

    if state is None:
        state = ground_and_first_excited(H, cap).ground
    sec = state.sector
    if sec is None:
        raise ValueError("OTOC reference state must be given in a sector basis")
    hm = sector_matrix(H, sec)
    w, v = np.linalg.eigh(hm)
    Ki = v.conj().T @ sector_matrix(ki, sec) @ v
    Kj = v.conj().T @ sector_matrix(kj, sec) @ v
    psi = v.conj().T @ state.amplitudes
    u = Ki @ psi  # <psi| Ki = (Ki psi)^dag since Ki is Hermitian
    out = np.empty(len(times), dtype=complex)
    # batches of time columns turn the matvecs into matrix products
    for lo in range(0, len(times), _OTOC_CHUNK):
        ph = np.exp(1j * np.outer(w, times[lo:lo + _OTOC_CHUNK]))
        a = ph * (Kj @ (ph.conj() * psi[:, None]))
        c = ph * (Kj @ (ph.conj() * (Ki @ a)))
        out[lo:lo + _OTOC_CHUNK] = u.conj() @ c
    return out


def _otoc_trace(H, ki, kj, sec, times):
    hm = sector_matrix(H, sec)
    w, v = np.linalg.eigh(hm)
    Ki = v.conj().T @ sector_matrix(ki, sec) @ v
    Kj = v.conj().T @ sector_matrix(kj, sec) @ v
    out = np.empty(len(times), dtype=complex)
    for n_t, t in enumerate(times):
        ph = np.exp(1j * w * t)
        Kjt = (ph[:, None] * Kj) * ph.conj()[None, :]
        A = Ki @ Kjt
        out[n_t] = np.trace(A @ A)
    return out
