"""Discretized AdS2 black-hole background.

Sites sit at ``r_n = r_h + n a`` for ``n = 1..N`` (1-based everywhere in the
public interface). The redshift factor ``alpha_n = sqrt(r_n^2 - r_h^2) / L``
multiplies every local energy scale of the lattice model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["LatticeGeometry"]


@dataclass(frozen=True)
class LatticeGeometry:
    """Immutable lattice description.

    Parameters
    ----------
    num_sites : int
        Number of qubits/sites ``N`` (even, at least 2).
    spacing : float
        Lattice spacing ``a``.
    ads_radius : float
        AdS radius ``L``. ``math.inf`` is allowed only for the flat background.
    horizon_radius : float
        Horizon radius ``r_h``; zero gives pure AdS2.
    background : {"ads", "flat"}
        ``"flat"`` replaces the redshift profile by ``alpha_n = 1`` and switches
        off the spin-connection term; it is the homogeneous reference chain.
    """

    num_sites: int
    spacing: float = 1.0
    ads_radius: float = 1.0
    horizon_radius: float = 0.0
    background: str = "ads"
    _alphas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.num_sites
        if isinstance(n, bool) or int(n) != n:
            raise ValueError(f"num_sites must be an integer, got {n!r}")
        object.__setattr__(self, "num_sites", int(n))
        if n < 2 or n % 2:
            raise ValueError(f"num_sites must be even and >= 2, got {n}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not self.ads_radius > 0:
            raise ValueError(f"ads_radius must be positive, got {self.ads_radius}")
        if not self.horizon_radius >= 0:
            raise ValueError(f"horizon_radius must be >= 0, got {self.horizon_radius}")
        if self.background not in ("ads", "flat"):
            raise ValueError(f"unknown background {self.background!r}")
        if self.background == "ads" and math.isinf(self.ads_radius):
            raise ValueError("an infinite AdS radius requires background='flat'")

        if self.background == "flat":
            alphas = np.ones(n)
        else:
            r = self.horizon_radius + self.spacing * np.arange(1, n + 1)
            alphas = np.sqrt(r**2 - self.horizon_radius**2) / self.ads_radius
        alphas.setflags(write=False)
        object.__setattr__(self, "_alphas", alphas)

    @classmethod
    def flat(cls, num_sites: int, spacing: float = 1.0) -> "LatticeGeometry":
        """Homogeneous chain with unit redshift and no spin connection."""
        return cls(num_sites, spacing, math.inf, 0.0, background="flat")

    @classmethod
    def continuum_scaled(cls, num_sites: int, ads_radius: float = 1.0,
                         horizon_radius: float = 0.0) -> "LatticeGeometry":
        """Geometry with ``a = 1/sqrt(N)`` so that ``r_N`` grows without bound."""
        return cls(num_sites, 1.0 / math.sqrt(num_sites), ads_radius, horizon_radius)

    def _check(self, n: int) -> int:
        if not 1 <= n <= self.num_sites:
            raise IndexError(f"site index {n} outside 1..{self.num_sites}")
        return n

    def site_radius(self, n: int) -> float:
        return self.horizon_radius + self._check(n) * self.spacing

    def redshift(self, n: int) -> float:
        return float(self._alphas[self._check(n) - 1])

    def effective_redshift(self, n: int) -> float:
        """Redshift seen by a boundary observer, ``alpha_n / alpha_N``."""
        return float(self._alphas[self._check(n) - 1] / self._alphas[-1])

    @property
    def alphas(self) -> np.ndarray:
        """Read-only profile ``(alpha_1, ..., alpha_N)``."""
        return self._alphas

    @cached_property
    def effective_alphas(self) -> np.ndarray:
        out = self._alphas / self._alphas[-1]
        out.setflags(write=False)
        return out

    @property
    def radii(self) -> np.ndarray:
        return self.horizon_radius + self.spacing * np.arange(1, self.num_sites + 1)

    @property
    def staggering(self) -> np.ndarray:
        """``(-1)^n`` for ``n = 1..N``."""
        return np.where(np.arange(1, self.num_sites + 1) % 2 == 0, 1.0, -1.0)

    def to_dict(self) -> dict:
        return {
            "num_sites": self.num_sites,
            "spacing": self.spacing,
            "ads_radius": self.ads_radius if math.isfinite(self.ads_radius) else "inf",
            "horizon_radius": self.horizon_radius,
            "background": self.background,
        }
