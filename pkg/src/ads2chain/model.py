"""Qubit Hamiltonian of the staggered Dirac fermion on the AdS2 background.

The spin Hamiltonian is kept as a list of weighted Pauli strings plus an
identity coefficient. The same model is available as a quadratic fermion
problem (an ``N x N`` tridiagonal matrix plus offset) through the
Jordan-Wigner map ``chi_n = (X_n - i Y_n)/2 prod_{i<n} (-i Z_i)``, under which
an occupied site is the qubit state ``|0>`` (``Z = +1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .geometry import LatticeGeometry

__all__ = [
    "ModelParams",
    "PauliString",
    "SpinHamiltonian",
    "SingleParticleHamiltonian",
    "build_spin_hamiltonian",
    "build_disorder_fields",
    "build_single_particle",
    "chiral_coefficients",
    "operator_q_flat",
    "operator_q_weighted",
    "operator_kappa",
    "operator_chi",
    "operator_current",
    "operator_chirality",
    "operator_imbalance",
    "operator_z",
]

_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the lattice model.

    ``chiral_weighting`` selects the spin-connection bond weight: ``"bond"``
    uses ``a n / (8 L^2)`` exactly as in the lattice Hamiltonian, ``"radius"``
    uses ``r_n / (8 L^2)``. ``redshift`` picks raw ``alpha_n`` or the
    boundary-normalized ``alpha_n / alpha_N``.
    """

    mass: float = 0.0
    chem_potential: float = 0.0
    disorder_width: float = 0.0
    disorder_weighted: bool = False
    seed: int = 0
    sample: int = 0
    chiral_weighting: str = "bond"
    redshift: str = "raw"

    def __post_init__(self):
        if not self.disorder_width >= 0:
            raise ValueError(f"disorder_width must be >= 0, got {self.disorder_width}")
        if self.chiral_weighting not in ("bond", "radius"):
            raise ValueError(f"unknown chiral_weighting {self.chiral_weighting!r}")
        if self.redshift not in ("raw", "effective"):
            raise ValueError(f"unknown redshift mode {self.redshift!r}")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PauliString:
    coefficient: float
    factors: tuple  # ((site, axis), ...) sorted by site, 1-based

    def __post_init__(self):
        facs = tuple(sorted((int(s), str(a)) for s, a in self.factors))
        sites = [s for s, _ in facs]
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated site in Pauli string {facs}")
        if any(a not in _AXES for _, a in facs):
            raise ValueError(f"bad axis in Pauli string {facs}")
        if not math.isfinite(self.coefficient):
            raise ValueError("Pauli coefficient must be finite")
        object.__setattr__(self, "factors", facs)

    @property
    def label(self) -> str:
        return " ".join(f"{a}{s}" for s, a in self.factors)


@dataclass(frozen=True)
class SpinHamiltonian:
    """Real-weighted sum of Pauli strings plus a constant (Hermitian by construction).

    Also used for observables (charges, chirality, imbalance).
    """

    geometry: LatticeGeometry
    terms: tuple = ()
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        n = self.geometry.num_sites
        for t in self.terms:
            if t.coefficient == 0:
                raise ValueError("zero-coefficient strings must be dropped")
            for s, _ in t.factors:
                if not 1 <= s <= n:
                    raise ValueError(f"site {s} outside 1..{n}")

    @property
    def num_sites(self) -> int:
        return self.geometry.num_sites

    def __add__(self, other: "SpinHamiltonian") -> "SpinHamiltonian":
        if other.geometry.num_sites != self.num_sites:
            raise ValueError("cannot add operators on different chains")
        return _collect(self.geometry, self.terms + other.terms, self.constant + other.constant)

    def __mul__(self, factor: float) -> "SpinHamiltonian":
        factor = float(factor)
        if factor == 0:
            return SpinHamiltonian(self.geometry, (), 0.0)
        terms = tuple(PauliString(t.coefficient * factor, t.factors) for t in self.terms)
        return SpinHamiltonian(self.geometry, terms, self.constant * factor)

    __rmul__ = __mul__

    def traceless(self) -> "SpinHamiltonian":
        """Same strings without the identity constant (energies as usually reported)."""
        return SpinHamiltonian(self.geometry, self.terms, 0.0)

    def coefficient_of(self, label: str) -> float:
        """Coefficient of a string such as ``"X1 Y2"`` (0 if absent)."""
        for t in self.terms:
            if t.label == label:
                return t.coefficient
        return 0.0

    def z_fields(self) -> np.ndarray:
        """Coefficients of the single-site ``Z_n`` strings."""
        out = np.zeros(self.num_sites)
        for t in self.terms:
            if len(t.factors) == 1 and t.factors[0][1] == "Z":
                out[t.factors[0][0] - 1] += t.coefficient
        return out


def _collect(geom, terms: Iterable[PauliString], constant: float) -> SpinHamiltonian:
    acc: dict = {}
    for t in terms:
        acc[t.factors] = acc.get(t.factors, 0.0) + t.coefficient
    kept = tuple(PauliString(c, f) for f, c in acc.items() if c != 0.0)
    return SpinHamiltonian(geom, kept, float(constant))


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """``H = sum_{nm} h_{nm} c_n^dag c_m + const_offset``."""

    matrix: np.ndarray
    const_offset: float = 0.0
    flags: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("single-particle matrix must be square")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-14:
            raise ValueError("single-particle matrix is not Hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    @property
    def num_sites(self) -> int:
        return self.matrix.shape[0]


# --------------------------------------------------------------------------
# builders


def _alphas(geom: LatticeGeometry, params: ModelParams) -> np.ndarray:
    return geom.effective_alphas if params.redshift == "effective" else geom.alphas


def chiral_coefficients(geom: LatticeGeometry, params: ModelParams | None = None) -> np.ndarray:
    """Spin-connection weight on bonds ``1..N-1`` (coefficient of ``X_nY_{n+1} - Y_nX_{n+1}``)."""
    if geom.background == "flat":
        return np.zeros(geom.num_sites - 1)
    weighting = params.chiral_weighting if params is not None else "bond"
    n = np.arange(1, geom.num_sites)
    pos = geom.spacing * n if weighting == "bond" else geom.horizon_radius + geom.spacing * n
    return pos / (8.0 * geom.ads_radius**2)


def build_disorder_fields(geom: LatticeGeometry, width: float, seed: int = 0,
                          sample: int = 0) -> np.ndarray:
    """On-site random fields ``h_n`` uniform on ``[-W, W]``.

    Each value comes from its own counter-based stream keyed by
    ``(seed, sample, n)``, so a field never depends on evaluation order.
    """
    if width < 0:
        raise ValueError("disorder width must be >= 0")
    n_sites = geom.num_sites
    if width == 0:
        return np.zeros(n_sites)
    out = np.empty(n_sites)
    for n in range(1, n_sites + 1):
        ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(sample), n])
        u = np.random.Generator(np.random.Philox(ss)).random()
        out[n - 1] = width * (2.0 * u - 1.0)
    return out


def _disorder_weights(geom, params) -> np.ndarray:
    return _alphas(geom, params) if params.disorder_weighted else np.ones(geom.num_sites)


def build_spin_hamiltonian(geom: LatticeGeometry, params: ModelParams,
                           fields: Sequence[float] | None = None) -> SpinHamiltonian:
    """Pauli-string form of the lattice Hamiltonian, constants included.

    ``fields`` overrides the seeded disorder draw (used by ensemble code).
    """
    n_sites = geom.num_sites
    a = geom.spacing
    alpha = _alphas(geom, params)
    stag = geom.staggering
    m, mu = params.mass, params.chem_potential
    chiral = chiral_coefficients(geom, params)

    terms = []
    for n in range(1, n_sites):
        hop = alpha[n - 1] ** 2 / (4.0 * a)
        terms.append(PauliString(hop, ((n, "X"), (n + 1, "X"))))
        terms.append(PauliString(hop, ((n, "Y"), (n + 1, "Y"))))
        c = chiral[n - 1]
        if c != 0.0:
            terms.append(PauliString(c, ((n, "X"), (n + 1, "Y"))))
            terms.append(PauliString(-c, ((n, "Y"), (n + 1, "X"))))

    z = 0.5 * m * stag * alpha - 0.5 * mu * alpha
    constant = float(np.sum(0.5 * m * stag * alpha) - np.sum(0.5 * mu * alpha * stag))

    h = _resolve_fields(geom, params, fields)
    z = z + 0.5 * h * _disorder_weights(geom, params)

    for n in range(1, n_sites + 1):
        if z[n - 1] != 0.0:
            terms.append(PauliString(float(z[n - 1]), ((n, "Z"),)))
    return _collect(geom, terms, constant)


def _resolve_fields(geom, params, fields) -> np.ndarray:
    if fields is not None:
        h = np.asarray(fields, dtype=float)
        if h.shape != (geom.num_sites,):
            raise ValueError("disorder fields must have one entry per site")
        return h
    return build_disorder_fields(geom, params.disorder_width, params.seed, params.sample)


def build_single_particle(geom: LatticeGeometry, params: ModelParams,
                          fields: Sequence[float] | None = None) -> SingleParticleHamiltonian:
    """Quadratic-fermion image of :func:`build_spin_hamiltonian`.

    A bond term ``A (XX + YY) + B (XY - YX)`` becomes the hopping
    ``h_{n,n+1} = 2B - 2iA``; ``Z_n = 2 c_n^dag c_n - 1`` gives the diagonal.
    """
    n_sites = geom.num_sites
    a = geom.spacing
    alpha = _alphas(geom, params)
    stag = geom.staggering
    m, mu = params.mass, params.chem_potential

    hop = alpha[:-1] ** 2 / (4.0 * a)
    chiral = chiral_coefficients(geom, params)
    off = 2.0 * chiral - 2.0j * hop

    h_fields = _resolve_fields(geom, params, fields) * _disorder_weights(geom, params)
    z = 0.5 * m * stag * alpha - 0.5 * mu * alpha + 0.5 * h_fields
    spin_const = np.sum(0.5 * m * stag * alpha) - np.sum(0.5 * mu * alpha * stag)

    mat = np.zeros((n_sites, n_sites), dtype=complex)
    idx = np.arange(n_sites - 1)
    mat[idx, idx + 1] = off
    mat[idx + 1, idx] = off.conj()
    mat[np.arange(n_sites), np.arange(n_sites)] = 2.0 * z
    return SingleParticleHamiltonian(mat, float(spin_const - np.sum(z)))


# --------------------------------------------------------------------------
# observables


def operator_z(geom: LatticeGeometry, n: int) -> SpinHamiltonian:
    geom._check(n)
    return SpinHamiltonian(geom, (PauliString(1.0, ((n, "Z"),)),), 0.0)


def _charge(geom, weights) -> SpinHamiltonian:
    a = geom.spacing
    terms = tuple(PauliString(w / (2 * a), ((n, "Z"),))
                  for n, w in enumerate(weights, start=1) if w != 0)
    return SpinHamiltonian(geom, terms, float(np.sum(weights * geom.staggering) / (2 * a)))


def operator_q_flat(geom: LatticeGeometry) -> SpinHamiltonian:
    """``sum_n (Z_n + (-1)^n) / 2a``."""
    return _charge(geom, np.ones(geom.num_sites))


def operator_q_weighted(geom: LatticeGeometry, effective: bool = False) -> SpinHamiltonian:
    """``sum_n alpha_n (Z_n + (-1)^n) / 2a``."""
    return _charge(geom, geom.effective_alphas if effective else geom.alphas)


def operator_kappa(geom: LatticeGeometry, i: int) -> SpinHamiltonian:
    """Vector chirality ``(X_i Y_{i+1} - Y_i X_{i+1}) / 4`` on bond ``i``."""
    if not 1 <= i <= geom.num_sites - 1:
        raise IndexError(f"bond {i} outside 1..{geom.num_sites - 1}")
    return SpinHamiltonian(geom, (PauliString(0.25, ((i, "X"), (i + 1, "Y"))),
                                  PauliString(-0.25, ((i, "Y"), (i + 1, "X")))), 0.0)


# Levi-Civita expansion of S_i . (S_{i+1} x S_{i+2})
_CHI_STRINGS = (("X", "Y", "Z", 1), ("Y", "Z", "X", 1), ("Z", "X", "Y", 1),
                ("X", "Z", "Y", -1), ("Z", "Y", "X", -1), ("Y", "X", "Z", -1))


def operator_chi(geom: LatticeGeometry, i: int) -> SpinHamiltonian:
    """Scalar chirality ``S_i . (S_{i+1} x S_{i+2})`` with ``S = sigma / 2``."""
    if not 1 <= i <= geom.num_sites - 2:
        raise IndexError(f"triangle {i} outside 1..{geom.num_sites - 2}")
    terms = tuple(PauliString(sign / 8.0, ((i, p), (i + 1, q), (i + 2, r)))
                  for p, q, r, sign in _CHI_STRINGS)
    return SpinHamiltonian(geom, terms, 0.0)


def operator_current(geom: LatticeGeometry, weighted: bool = False) -> SpinHamiltonian:
    """``J = sum_i kappa_i`` or ``J_weighted = sum_i alpha_i^2 kappa_i``."""
    alpha = geom.alphas
    out = SpinHamiltonian(geom, (), 0.0)
    for i in range(1, geom.num_sites):
        w = alpha[i - 1] ** 2 if weighted else 1.0
        out = out + w * operator_kappa(geom, i)
    return out


def operator_chirality(geom: LatticeGeometry) -> SpinHamiltonian:
    """Total scalar chirality ``sum_i chi_i``."""
    out = SpinHamiltonian(geom, (), 0.0)
    for i in range(1, geom.num_sites - 1):
        out = out + operator_chi(geom, i)
    return out


def operator_imbalance(geom: LatticeGeometry, weighted: bool = False,
                       effective: bool = False) -> SpinHamiltonian:
    """Staggered magnetization density ``(1/2N) sum_n (-1)^n [alpha_n] Z_n``.

    ``effective`` weights by ``alpha_n / alpha_N`` (only used when ``weighted``).
    """
    n_sites = geom.num_sites
    if weighted:
        w = geom.effective_alphas if effective else geom.alphas
    else:
        w = np.ones(n_sites)
    coef = geom.staggering * w / (2.0 * n_sites)
    terms = tuple(PauliString(float(c), ((n, "Z"),)) for n, c in enumerate(coef, start=1))
    return SpinHamiltonian(geom, terms, 0.0)
