"""Polynomial-cost engine for the quadratic model.

Everything here works from the single-particle matrix ``h``: mode energies,
Slater-determinant correlation matrices ``C_ij = <c_i^dag c_j>``, entanglement
from the spectrum of a ``C`` block, and expectation values of arbitrary Pauli
strings through Wick's theorem on Majorana operators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import LatticeGeometry
from .model import PauliString, SingleParticleHamiltonian, SpinHamiltonian

__all__ = [
    "ModeBasis",
    "CorrelationMatrix",
    "diagonalize_modes",
    "ground_energy",
    "first_excited_energy",
    "occupations",
    "correlation_matrix",
    "entanglement_from_correlation",
    "entanglement_profile",
    "charge_profiles",
    "delta_charge",
    "pauli_expectation",
    "expectation",
    "pfaffian",
]

log = logging.getLogger(__name__)

ZERO_MODE_TOL = 1e-12
CLAMP_EPS = 1e-14
_NU_TOL = 1e-9


@dataclass(frozen=True)
class ModeBasis:
    energies: np.ndarray
    wavefunctions: np.ndarray  # columns psi_j(n)
    const_offset: float = 0.0

    @property
    def num_sites(self) -> int:
        return len(self.energies)

    @property
    def zero_modes(self) -> np.ndarray:
        return np.flatnonzero(np.abs(self.energies) <= ZERO_MODE_TOL)


@dataclass(frozen=True)
class CorrelationMatrix:
    entries: np.ndarray
    occupied: np.ndarray = field(default=None, repr=False)
    flags: dict = field(default_factory=dict, compare=False)

    @property
    def num_sites(self) -> int:
        return self.entries.shape[0]


def diagonalize_modes(h: SingleParticleHamiltonian) -> ModeBasis:
    eps, psi = np.linalg.eigh(h.matrix)
    return ModeBasis(eps, psi, h.const_offset)


def occupations(modes: ModeBasis, rule: str = "ground") -> np.ndarray:
    """Boolean occupation vector.

    ``"ground"`` fills ``eps < 0`` (zero modes left empty). ``"swap"`` moves
    the particle from the highest occupied to the lowest empty mode, keeping
    the charge. ``"flip"`` toggles the mode of smallest ``|eps|``, which is
    the global first excited state.
    """
    eps = modes.energies
    occ = eps < -ZERO_MODE_TOL
    if rule == "ground":
        return occ
    if rule == "swap":
        filled, empty = np.flatnonzero(occ), np.flatnonzero(~occ)
        if len(filled) == 0 or len(empty) == 0:
            raise ValueError("swap excitation needs both filled and empty modes")
        occ = occ.copy()
        occ[filled[-1]] = False
        occ[empty[0]] = True
        return occ
    if rule == "flip":
        occ = occ.copy()
        j = int(np.argmin(np.abs(eps)))
        occ[j] = not occ[j]
        return occ
    raise ValueError(f"unknown occupation rule {rule!r}")


def ground_energy(modes: ModeBasis) -> float:
    eps = modes.energies
    return float(np.sum(eps[eps < -ZERO_MODE_TOL]) + modes.const_offset)


def first_excited_energy(modes: ModeBasis) -> float:
    return ground_energy(modes) + float(np.min(np.abs(modes.energies)))


def swap_energy(modes: ModeBasis) -> float:
    """Energy of the charge-neutral HOMO -> LUMO excitation."""
    occ = occupations(modes, "swap")
    return float(np.sum(modes.energies[occ]) + modes.const_offset)


def correlation_matrix(modes: ModeBasis, rule: str = "ground") -> CorrelationMatrix:
    """``C_ij = sum_occ conj(psi_j(i)) psi_j(j)``."""
    occ = occupations(modes, rule)
    psi = modes.wavefunctions[:, occ]
    C = psi.conj() @ psi.T
    flags = {"zero_modes": int(len(modes.zero_modes)), "rule": rule}
    if flags["zero_modes"]:
        log.info("zero-energy mode(s) present; left empty")
    return CorrelationMatrix(C, occ, flags)


def _block_eigs(C: CorrelationMatrix, cut: int) -> np.ndarray:
    n = C.num_sites
    if not 1 <= cut < n:
        raise ValueError(f"cut must satisfy 1 <= cut < {n}")
    nu = np.linalg.eigvalsh(C.entries[:cut, :cut])
    if nu.min() < -_NU_TOL or nu.max() > 1 + _NU_TOL:
        raise ValueError("correlation eigenvalues outside [0, 1]; broken unitarity")
    return nu


def entanglement_from_correlation(C: CorrelationMatrix, cut: int) -> float:
    nu = np.clip(_block_eigs(C, cut), CLAMP_EPS, 1 - CLAMP_EPS)
    return float(-np.sum(nu * np.log(nu) + (1 - nu) * np.log(1 - nu)))


def entanglement_profile(C: CorrelationMatrix) -> np.ndarray:
    """``S(l)`` for ``l = 1..N-1``."""
    return np.array([entanglement_from_correlation(C, l) for l in range(1, C.num_sites)])


def charge_profiles(C: CorrelationMatrix, geom: LatticeGeometry, effective: bool = False):
    """Local flat and weighted charges ``q_n = (<Z_n> + (-1)^n) / 2a``.

    ``<Z_n> = 2 C_nn - 1``; the weighted profile multiplies by ``alpha_n``.
    """
    z = 2.0 * np.real(np.diag(C.entries)) - 1.0
    q = (z + geom.staggering) / (2.0 * geom.spacing)
    alpha = geom.effective_alphas if effective else geom.alphas
    return q, alpha * q


def delta_charge(modes: ModeBasis) -> np.ndarray:
    """``|psi_LUMO(n)|^2 - |psi_HOMO(n)|^2`` for the swap excitation."""
    occ = modes.energies < -ZERO_MODE_TOL
    filled, empty = np.flatnonzero(occ), np.flatnonzero(~occ)
    psi = modes.wavefunctions
    return np.abs(psi[:, empty[0]]) ** 2 - np.abs(psi[:, filled[-1]]) ** 2


# --------------------------------------------------------------------------
# Pauli strings in Gaussian states
#
# With f_n = (a_{2n-1} - i a_{2n}) / 2 (standard Jordan-Wigner Majoranas,
# a_{2n-1} = Z_1..Z_{n-1} X_n, a_{2n} = Z_1..Z_{n-1} Y_n) the model's fermion is
# c_n = (-i)^(n-1) f_n.


def pfaffian(A: np.ndarray) -> complex:
    """Pfaffian of a complex antisymmetric matrix (Parlett-Reid elimination)."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            A[k + 2:, k + 2:] += np.outer(tau, A[k + 2:, k + 1]) - np.outer(A[k + 2:, k + 1], tau)
    return pf


def _majorana_covariance(C: CorrelationMatrix) -> np.ndarray:
    """``G_kl = <a_k a_l>`` over the ``2N`` Majoranas (0-based)."""
    n = C.num_sites
    phase = (-1j) ** np.arange(n)  # c_n = phase_n f_n, |phase_n| = 1
    G = C.entries * phase[:, None] * phase.conj()[None, :]  # <f_i^dag f_j>
    ff = np.zeros((2 * n, 2 * n), dtype=complex)
    # v = (f_1..f_N, f_1^dag..f_N^dag); K_pq = <v_p v_q>
    ff[:n, n:] = np.eye(n) - G.T  # <f_i f_j^dag> = delta_ij - <f_j^dag f_i>
    ff[n:, :n] = G  # <f_i^dag f_j>
    T = np.zeros((2 * n, 2 * n), dtype=complex)
    idx = np.arange(n)
    T[2 * idx, idx] = 1.0
    T[2 * idx, n + idx] = 1.0  # a_{2n-1} = f + f^dag
    T[2 * idx + 1, idx] = 1j
    T[2 * idx + 1, n + idx] = -1j  # a_{2n} = i (f - f^dag)
    return T @ ff @ T.T


def _majorana_word(factors, n_sites: int):
    """Phase and sorted 0-based Majorana indices representing a Pauli string."""
    word: list[int] = []
    phase = 1.0 + 0j
    for site, axis in factors:
        s = site - 1
        if axis == "Z":
            phase *= -1j
            word += [2 * s, 2 * s + 1]
        else:
            for j in range(s):  # Jordan-Wigner string Z_1..Z_{s}
                phase *= -1j
                word += [2 * j, 2 * j + 1]
            word.append(2 * s if axis == "X" else 2 * s + 1)
    # sort with anticommutation signs, cancel squares
    arr = list(word)
    sign = 1
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    out: list[int] = []
    for k in arr:
        if out and out[-1] == k:
            out.pop()
        else:
            out.append(k)
    return phase * sign, out


def pauli_expectation(C: CorrelationMatrix, string: PauliString,
                      _cov: np.ndarray | None = None) -> complex:
    cov = _majorana_covariance(C) if _cov is None else _cov
    phase, word = _majorana_word(string.factors, C.num_sites)
    if len(word) % 2:
        return 0.0
    if not word:
        return string.coefficient * phase
    sub = cov[np.ix_(word, word)]
    sub = np.triu(sub, 1)
    sub = sub - sub.T
    return string.coefficient * phase * pfaffian(sub)


def expectation(C: CorrelationMatrix, op: SpinHamiltonian, imag_tol: float = 1e-10) -> float:
    """``<O>`` of a Pauli-sum observable in the Gaussian state ``C``."""
    cov = _majorana_covariance(C)
    val = op.constant + sum(pauli_expectation(C, t, cov) for t in op.terms)
    val = complex(val)
    if abs(val.imag) > imag_tol * max(1.0, abs(val.real)):
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)

