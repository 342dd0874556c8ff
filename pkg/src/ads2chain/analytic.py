"""Closed-form reference values: dispersions, Fermi momenta, charges and gaps.

All functions are vectorized over numpy inputs where it makes sense.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import LatticeGeometry

__all__ = [
    "dispersion_continuum",
    "dispersion_lattice",
    "fermi_momentum",
    "site_ground_energy",
    "total_charge_exact",
    "continuum_charge",
    "gap_continuum",
    "gap_finite_N",
    "gap_large_mass",
    "harmonic_sum",
    "harmonic_sum_series",
    "large_mass_ground_energy",
]


def dispersion_continuum(alpha, m, k, mu=0.0):
    """``alpha sqrt(m^2 + (alpha k)^2) - mu``."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0):
        raise ValueError("alpha must be non-negative")
    return alpha * np.sqrt(m**2 + (alpha * np.asarray(k)) ** 2) - mu


def dispersion_lattice(alpha, m, k, a=1.0):
    """``alpha sqrt(m^2 + (4 alpha^2 / a^2) sin^2(k a / 2))``."""
    if not a > 0:
        raise ValueError("lattice spacing must be positive")
    alpha = np.asarray(alpha, dtype=float)
    s = np.sin(np.asarray(k) * a / 2.0)
    return alpha * np.sqrt(m**2 + 4.0 * alpha**2 / a**2 * s**2)


def fermi_momentum(alpha, m, mu):
    """Local Fermi momentum ``sqrt(mu^2 - alpha^2 m^2) / alpha^2`` for ``mu > alpha m``.

    Theta(0) is taken as 0. For ``m < 0`` the step alone would admit
    ``0 <= mu < alpha |m|`` where the root is imaginary; those sites are closed too.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise ValueError("alpha must be positive")
    arg = mu**2 - alpha**2 * m**2
    open_ = (mu - alpha * m > 0) & (arg > 0)
    kf = np.where(open_, np.sqrt(np.where(open_, arg, 0.0)) / alpha**2, 0.0)
    return kf if kf.ndim else float(kf)


def site_ground_energy(alpha, m, mu):
    """Per-site ground energy ``[m^2 asinh(alpha k_F / m) - mu k_F] / 2 pi``.

    The logarithm is written as ``asinh``; for ``m = 0`` the first term
    vanishes and only ``-mu k_F / 2 pi`` survives.
    """
    kf = np.asarray(fermi_momentum(alpha, m, mu))
    alpha = np.asarray(alpha, dtype=float)
    if m == 0:
        log_term = np.zeros_like(kf)
    else:
        log_term = m**2 * np.arcsinh(alpha * kf / abs(m))
    out = (log_term - mu * kf) / (2 * math.pi)
    return out if out.ndim else float(out)


def continuum_charge(alpha, m, mu):
    """Local charge density ``k_F / pi``, odd under ``(m, mu) -> (-m, -mu)``.

    For ``mu < 0`` the hole branch is obtained from the particle branch by
    charge conjugation, so ``Q(m, mu) = -Q(-m, -mu)`` holds identically.
    """
    if mu < 0:
        return -continuum_charge(alpha, -m, -mu)
    q = np.asarray(fermi_momentum(alpha, m, mu)) / math.pi
    return q if q.ndim else float(q)


def total_charge_exact(geom: LatticeGeometry, m: float, mu: float) -> float:
    """Sum of local Fermi-sea charges over the lattice sites."""
    return float(np.sum(continuum_charge(geom.alphas, m, mu)))


def gap_continuum(m: float, mu: float) -> float:
    """Distance from ``|mu|`` to the interval ``[0, |m|]``."""
    return max(abs(mu) - abs(m), 0.0)


def gap_finite_N(alpha: float, m: float, mu: float, N: int, a: float = 1.0) -> float:
    """``alpha m - mu + (alpha^3 / 2m) (pi / ((N+1) a))^2``."""
    if m == 0:
        raise ValueError("finite-size expansion requires m != 0")
    k1 = math.pi / ((N + 1) * a)
    return alpha * m - mu + alpha**3 / (2 * m) * k1**2


def gap_large_mass(geom: LatticeGeometry, m: float, mu: float = 0.0) -> float:
    """Large-|m| (or large-|mu|) gap set by the innermost site, ``alpha_1 max(|m|, |mu|)``."""
    return geom.alphas[0] * max(abs(m), abs(mu))


def large_mass_ground_energy(geom: LatticeGeometry, m: float) -> float:
    """``-(|m|/2) sum_n alpha_n`` (identity constants excluded)."""
    return -0.5 * abs(m) * float(np.sum(geom.alphas))


def harmonic_sum(N: int, beta: float) -> float:
    """Exact ``S_N(beta) = sum_{n=1}^N sqrt(n (n + beta))``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=float)
    return float(np.sum(np.sqrt(n * (n + beta))))


def harmonic_sum_series(N: int, beta: float) -> float:
    """Expansion of ``S_N(beta)`` in generalized harmonic numbers through ``beta^3``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, N + 1, dtype=float)
    h1 = float(np.sum(1.0 / n))
    h2 = float(np.sum(1.0 / n**2))
    return N * (N + 1) / 2 + beta * N / 2 - beta**2 * h1 / 8 + beta**3 * h2 / 16
