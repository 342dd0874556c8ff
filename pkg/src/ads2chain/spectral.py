"""Level statistics: unfolding, spacing ratios and Brody fits.

The estimator-style classes (``SpectrumUnfolder``, ``BrodyEstimator``) wrap
the functional API so the pieces compose with scikit-learn tooling; the
functions are the primary interface.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial import Polynomial
from scipy import optimize, special
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

__all__ = [
    "UnfoldedSpectrum",
    "RStats",
    "BrodyFit",
    "unfold",
    "SpectrumUnfolder",
    "spacings",
    "r_values",
    "r_statistics",
    "brody_b",
    "brody_pdf",
    "brody_fit",
    "BrodyEstimator",
    "delta_of_zero_spacing_fraction",
    "sample_poisson_levels",
    "sample_goe_spectra",
    "load_spectrum_csv",
    "R_POISSON",
    "R_GOE",
]

log = logging.getLogger(__name__)

R_POISSON = 2 * math.log(2) - 1
R_GOE = 0.5307
ZERO_SPACING = 1e-8
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class UnfoldedSpectrum:
    raw_levels: np.ndarray
    unfolded: np.ndarray
    poly_degree: int
    flags: dict = field(default_factory=dict, compare=False)

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.unfolded)


@dataclass(frozen=True)
class RStats:
    """Per-sector ``(<r>_q, M_q)`` and the ``M_q``-weighted mean."""

    per_sector: dict
    weighted_mean: float
    skipped: tuple = ()
    degenerate_count: int = 0


@dataclass(frozen=True)
class BrodyFit:
    beta: float
    fit_error: float
    histogram: tuple  # (edges, densities)
    method: str = "lsq"


# -- unfolding --------------------------------------------------------------


def _fit_staircase(levels: np.ndarray, degree: int):
    """Polynomial fit of the cumulative count; lowers degree until monotone."""
    counts = np.arange(1, len(levels) + 1, dtype=float)
    grid = np.linspace(levels[0], levels[-1], 20 * len(levels))
    flags = {}
    d = degree
    while d >= 1:
        poly = Polynomial.fit(levels, counts, d)
        if np.all(poly.deriv()(grid) >= 0):
            break
        d -= 1
    if d < degree:
        flags["degree_reduced_from"] = degree
        log.info("unfolding polynomial lowered from %d to %d for monotonicity", degree, d)
    return poly, d, flags


def unfold(levels, poly_degree: int = 6) -> UnfoldedSpectrum:
    """Map levels through a smooth fit ``N(E)`` of the level staircase.

    Parameters
    ----------
    levels : array_like
        Raw eigenvalues (any order).
    poly_degree : int
        Degree of the polynomial staircase fit.

    Raises
    ------
    ValueError
        If fewer than ``poly_degree + 2`` levels are supplied.
    """
    E = np.sort(np.asarray(levels, dtype=float).ravel())
    if len(E) < poly_degree + 2:
        raise ValueError(f"need at least {poly_degree + 2} levels, got {len(E)}")
    if E[-1] == E[0]:
        raise ValueError("all levels coincide; cannot unfold")
    poly, d, flags = _fit_staircase(E, poly_degree)
    return UnfoldedSpectrum(E, poly(E), d, flags)


class SpectrumUnfolder(TransformerMixin, BaseEstimator):
    """Transformer version of :func:`unfold`.

    ``fit`` learns the staircase polynomial from a 1-D array of levels and
    ``transform`` maps levels through it.
    """

    def __init__(self, poly_degree: int = 6):
        self.poly_degree = poly_degree

    def fit(self, X, y=None):
        E = np.sort(np.asarray(X, dtype=float).ravel())
        if len(E) < self.poly_degree + 2:
            raise ValueError(f"need at least {self.poly_degree + 2} levels")
        self.poly_, self.degree_, self.flags_ = _fit_staircase(E, self.poly_degree)
        return self

    def transform(self, X):
        check_is_fitted(self, "poly_")
        X = np.asarray(X, dtype=float)
        return self.poly_(X)


# -- spacing ratios ---------------------------------------------------------


def spacings(levels) -> np.ndarray:
    return np.diff(np.sort(np.asarray(levels, dtype=float).ravel()))


def r_values(levels) -> np.ndarray:
    """``min(s_i, s_{i-1}) / max(s_i, s_{i-1})``; a zero denominator gives 0."""
    s = spacings(levels)
    lo = np.minimum(s[1:], s[:-1])
    hi = np.maximum(s[1:], s[:-1])
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(hi > _DEGENERATE, lo / hi, 0.0)
    r[lo <= _DEGENERATE] = 0.0
    return r


def r_statistics(levels_by_sector, unfold_levels: bool = True, poly_degree: int = 6,
                 min_levels: int = 10) -> RStats:
    """Sector-resolved spacing-ratio averages.

    Parameters
    ----------
    levels_by_sector : dict or array_like
        Mapping ``q -> levels``; a bare array is treated as one sector.
    unfold_levels : bool
        Unfold each sector before taking ratios. Ratios are affine invariant,
        so this matters only through the non-linear part of the fit.
    min_levels : int
        Sectors with fewer levels are reported but left out of the weighted mean.
    """
    if not isinstance(levels_by_sector, dict):
        levels_by_sector = {0.0: levels_by_sector}
    per_sector, skipped = {}, []
    degenerate = 0
    for q, lv in sorted(levels_by_sector.items()):
        lv = np.sort(np.asarray(lv, dtype=float).ravel())
        if len(lv) < 3:
            skipped.append(q)
            continue
        if unfold_levels and len(lv) >= poly_degree + 2 and lv[-1] > lv[0]:
            lv = unfold(lv, poly_degree).unfolded
        degenerate += int(np.sum(np.diff(lv) <= _DEGENERATE))
        r = r_values(lv)
        per_sector[q] = (float(r.mean()), len(r))
        if len(lv) < min_levels:
            skipped.append(q)
    counted = {q: v for q, v in per_sector.items() if q not in skipped}
    if not counted:
        raise ValueError("no sector has enough levels for r-statistics")
    total = sum(M for _, M in counted.values())
    mean = sum(r * M for r, M in counted.values()) / total
    return RStats(per_sector, float(mean), tuple(skipped), degenerate)


# -- Brody distribution -----------------------------------------------------


def brody_b(beta: float) -> float:
    return special.gamma((beta + 2) / (beta + 1)) ** (beta + 1)


def brody_pdf(s, beta: float):
    """``(beta+1) b s^beta exp(-b s^(beta+1))``."""
    s = np.asarray(s, dtype=float)
    b = brody_b(beta)
    return (beta + 1) * b * s**beta * np.exp(-b * s ** (beta + 1))


def _histogram(s, bins: int, s_max: float):
    # normalized over the binned window; the model below is conditioned on s <= s_max
    dens, edges = np.histogram(s, bins=bins, range=(0.0, s_max), density=True)
    return edges, dens


def brody_fit(spacings_, method: str = "lsq", bins: int = 40, s_max: float = 4.0) -> BrodyFit:
    """Fit the Brody parameter to unit-mean spacings.

    ``"lsq"`` minimizes the squared distance between the histogram and the
    bin-averaged density, both normalized on ``[0, s_max]``; ``"ml"``
    maximizes the likelihood. ``beta`` is confined to ``[0, 1]``.
    """
    s = np.asarray(spacings_, dtype=float).ravel()
    if len(s) < 50:
        raise ValueError(f"need at least 50 spacings, got {len(s)}")
    s = s / s.mean()
    edges, dens = _histogram(s, bins, s_max)
    width = np.diff(edges)

    def model(beta):
        b = brody_b(beta)
        cdf = 1.0 - np.exp(-b * edges ** (beta + 1))
        return np.diff(cdf) / (width * cdf[-1])

    def lsq(beta):
        return float(np.sum((model(beta) - dens) ** 2 * width))

    if method == "lsq":
        res = optimize.minimize_scalar(lsq, bounds=(0.0, 1.0), method="bounded",
                                       options={"xatol": 1e-8})
        beta = float(res.x)
    elif method == "ml":
        pos = s[s > 0]

        def nll(beta):
            return -float(np.sum(np.log(brody_pdf(pos, beta))))

        beta = float(optimize.minimize_scalar(nll, bounds=(0.0, 1.0), method="bounded").x)
    else:
        raise ValueError(f"unknown method {method!r}")
    # endpoints are allowed; compare with them explicitly
    cands = [(lsq(b), b) for b in (0.0, beta, 1.0)] if method == "lsq" else [(lsq(beta), beta)]
    err, beta = min(cands)
    return BrodyFit(beta, math.sqrt(err), (edges, dens), method)


class BrodyEstimator(BaseEstimator):
    """Estimator wrapper around :func:`brody_fit`; the fitted value is ``beta_``."""

    def __init__(self, method: str = "lsq", bins: int = 40, s_max: float = 4.0):
        self.method = method
        self.bins = bins
        self.s_max = s_max

    def fit(self, X, y=None):
        fit = brody_fit(X, self.method, self.bins, self.s_max)
        self.beta_ = fit.beta
        self.fit_error_ = fit.fit_error
        self.histogram_ = fit.histogram
        return self

    def score_samples(self, X):
        check_is_fitted(self, "beta_")
        return np.log(brody_pdf(np.asarray(X, dtype=float).ravel(), self.beta_))


def delta_of_zero_spacing_fraction(spacings_, threshold: float = ZERO_SPACING) -> float:
    """Fraction of spacings below ``threshold`` (the discrete weight at ``s = 0``)."""
    s = np.asarray(spacings_, dtype=float).ravel()
    if len(s) == 0:
        return 0.0
    return float(np.mean(s < threshold))


# -- reference ensembles ----------------------------------------------------


def sample_poisson_levels(n: int, rng=None) -> np.ndarray:
    """Levels with i.i.d. unit-mean exponential spacings."""
    rng = np.random.default_rng(rng)
    return np.cumsum(rng.exponential(1.0, n))


def sample_goe_spectra(n_matrices: int, dim: int, rng=None):
    """Eigenvalues of ``n_matrices`` GOE matrices of size ``dim`` (generator)."""
    rng = np.random.default_rng(rng)
    for _ in range(n_matrices):
        A = rng.standard_normal((dim, dim))
        yield np.linalg.eigvalsh((A + A.T) / 2)


def load_spectrum_csv(path) -> dict:
    """Read levels from CSV; an optional second column holds sector labels.

    A header row is skipped when its first field is not numeric.
    """
    out: dict = {}
    with open(Path(path), newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                e = float(row[0])
            except ValueError:
                continue
            q = float(row[1]) if len(row) > 1 and row[1].strip() else 0.0
            out.setdefault(q, []).append(e)
    return {q: np.array(v) for q, v in out.items()}
