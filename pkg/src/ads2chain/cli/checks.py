"""Invariant suite behind ``ads2chain validate``.

Each check returns ``(name, ok, detail)``. The quick variant shrinks chain
lengths and draw counts so the whole suite stays within a few seconds.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np
from scipy import integrate

from .. import analytic, ed, spectral
from .. import freefermion as ff
from ..geometry import LatticeGeometry
from ..model import (
    ModelParams,
    build_single_particle,
    build_spin_hamiltonian,
    operator_q_flat,
)
from .output import read_csv, write_csv


def _draws(n, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        yield (float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)),
               float(rng.choice([0.0, 1.0, 5.0])))


def check_hermitian(quick):
    n = 6 if quick else 8
    geom = LatticeGeometry(n, horizon_radius=1.0)
    H = ed.full_matrix(build_spin_hamiltonian(geom, ModelParams(0.7, -0.3)))
    err = float(abs(H - H.getH()).max())
    return "hamiltonian is hermitian", err < 1e-14, f"max |H - H^dag| = {err:.2e}"


def check_engines(quick):
    worst = 0.0
    sizes = (4, 6) if quick else (4, 6, 8, 10)
    for n in sizes:
        for m, mu, rh in _draws(3 if quick else 5, seed=n):
            geom = LatticeGeometry(n, horizon_radius=rh)
            p = ModelParams(m, mu)
            low = ed.ground_and_first_excited(build_spin_hamiltonian(geom, p))
            modes = ff.diagonalize_modes(build_single_particle(geom, p))
            C = ff.correlation_matrix(modes)
            scale = max(1.0, abs(low.e0))
            worst = max(worst,
                        abs(low.e0 - ff.ground_energy(modes)) / scale,
                        abs(low.e1 - ff.first_excited_energy(modes)) / scale)
            if not low.degenerate:
                s_ed = ed.entanglement_entropy(low.ground, n // 2)
                worst = max(worst, abs(s_ed - ff.entanglement_from_correlation(C, n // 2)))
    return "ed and ff agree", worst < 1e-8, f"worst deviation {worst:.2e}"


def check_charge_conservation(quick):
    n = 8 if quick else 10
    geom = LatticeGeometry(n, horizon_radius=1.0)
    H = ed.full_matrix(build_spin_hamiltonian(geom, ModelParams(1.3, 0.4)))
    Q = ed.full_matrix(operator_q_flat(geom))
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(3 if quick else 10):
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        v /= np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(H @ (Q @ v) - Q @ (H @ v))))
    return "[H, Q_flat] = 0", worst < 1e-12, f"max norm {worst:.2e}"


def check_mass_sign_symmetry(quick):
    n = 6 if quick else 8
    worst = 0.0
    for m, mu, rh in _draws(2 if quick else 5, seed=11):
        geom = LatticeGeometry(n, horizon_radius=rh)
        a = ed.eigensolve(build_spin_hamiltonian(geom, ModelParams(m, mu)).traceless(),
                          vectors=False).eigenvalues
        b = ed.eigensolve(build_spin_hamiltonian(geom, ModelParams(-m, -mu)).traceless(),
                          vectors=False).eigenvalues
        worst = max(worst, float(np.max(np.abs(np.sort(a) - np.sort(b)))))
    return "spectrum invariant under (m, mu) -> (-m, -mu)", worst < 1e-10, f"{worst:.2e}"


def check_correlation_projector(quick):
    n = 40 if quick else 200
    geom = LatticeGeometry(n, horizon_radius=2.0)
    C = ff.correlation_matrix(ff.diagonalize_modes(
        build_single_particle(geom, ModelParams(0.5, 0.2)))).entries
    err = float(np.max(np.abs(C @ C - C)))
    return "ground correlation matrix is a projector", err < 1e-10, f"{err:.2e}"


def check_harmonic_identity(quick):
    n, rh = (30, 2.0) if quick else (200, 7.0)
    geom = LatticeGeometry(n, horizon_radius=rh)
    lhs = float(geom.alphas.sum())
    rhs = analytic.harmonic_sum(n, 2 * rh) / geom.ads_radius
    err = abs(lhs - rhs) / rhs
    return "sum of redshifts equals S_N(2 r_h)", err < 1e-12, f"rel err {err:.2e}"


def check_large_mass_gap(quick):
    geom = LatticeGeometry(8 if quick else 10, horizon_radius=2.0)
    p = ModelParams(100.0, 0.0)
    modes = ff.diagonalize_modes(build_single_particle(geom, p))
    gap = ff.first_excited_energy(modes) - ff.ground_energy(modes)
    ref = analytic.gap_large_mass(geom, 100.0)
    err = abs(gap - ref) / ref
    return "large-mass gap", err < 0.01, f"rel err {err:.2e}"


def check_brody_normalization(quick):
    worst = 0.0
    for beta in (0.0, 0.5, 1.0):
        val, _ = integrate.quad(spectral.brody_pdf, 0, np.inf, args=(beta,))
        worst = max(worst, abs(val - 1))
    return "Brody density normalized", worst < 1e-6, f"{worst:.2e}"


def check_csv_roundtrip(quick):
    rng = np.random.default_rng(5)
    vals = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-12, 12, size=(20, 3))
    with tempfile.TemporaryDirectory() as tmp:
        path = write_csv(Path(tmp) / "x.csv", ["a", "b", "c"], vals.tolist())
        _, back = read_csv(path)
    ok = bool(np.array_equal(back, vals))
    return "CSV round trip is exact", ok, "bitwise" if ok else "mismatch"


CHECKS = (check_hermitian, check_engines, check_charge_conservation,
          check_mass_sign_symmetry, check_correlation_projector, check_harmonic_identity,
          check_large_mass_gap, check_brody_normalization, check_csv_roundtrip)


def run_checks(quick: bool = True) -> list[tuple[str, bool, str]]:
    out = []
    for fn in CHECKS:
        try:
            out.append(fn(quick))
        except Exception as exc:  # a crash is a failed invariant, not an abort
            out.append((fn.__name__, False, f"raised {type(exc).__name__}: {exc}"))
    return out
