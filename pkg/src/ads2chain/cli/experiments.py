"""Experiment runners behind ``run``.

Each runner takes an :class:`ExperimentConfig` and returns a
:class:`RunResult`: named tables (header + rows) plus metadata flags. Grid
points are independent and may be farmed out to a process pool; rows are
always assembled in grid order so output never depends on scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import dynamics as dyn
from .. import ed
from .. import freefermion as ff
from .. import spectral
from ..analytic import gap_large_mass
from ..geometry import LatticeGeometry
from ..model import (
    build_single_particle,
    build_spin_hamiltonian,
    operator_chi,
    operator_kappa,
    operator_q_flat,
    operator_q_weighted,
)
from .config import ExperimentConfig

log = logging.getLogger(__name__)


@dataclass
class Table:
    columns: list
    rows: list


@dataclass
class RunResult:
    tables: dict
    flags: dict = field(default_factory=dict)


def _pmap(fn, jobs, threads: int):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _ed_cap_check(cfg, n):
    if n > ed.DEFAULT_CAP:
        raise ed.EngineCapError(
            f"ed engine limited to N <= {ed.DEFAULT_CAP}; requested N = {n} "
            f"(use engine = 'ff' for quadratic observables)")


# -- heatmap ----------------------------------------------------------------


def _heatmap_point(job):
    cfg, m, mu = job
    geom = cfg.make_geometry()
    params = cfg.make_params(mass=m, chem_potential=mu)
    effective = params.redshift == "effective"
    n = geom.num_sites
    if cfg.resolved_engine() == "ff":
        modes = ff.diagonalize_modes(build_single_particle(geom, params))
        e0, e1 = ff.ground_energy(modes), ff.first_excited_energy(modes)
        C = ff.correlation_matrix(modes)
        q, qw = ff.charge_profiles(C, geom, effective=effective)
        qf, qwt = float(q.sum()), float(qw.sum())
        s = ff.entanglement_from_correlation(C, n // 2)
        zero = bool(len(modes.zero_modes))
    else:
        H = build_spin_hamiltonian(geom, params)
        low = ed.ground_and_first_excited(H)
        e0, e1 = low.e0, low.e1
        qf = ed.expectation(low.ground, operator_q_flat(geom))
        qwt = ed.expectation(low.ground, operator_q_weighted(geom, effective=effective))
        s = ed.entanglement_entropy(low.ground, n // 2)
        zero = low.degenerate
    if cfg.sweep["energy_convention"] == "traceless":
        # identity parts dropped: energies and the weighted charge lose their constants
        c = build_spin_hamiltonian(geom, params).constant
        e0, e1 = e0 - c, e1 - c
        qwt -= operator_q_weighted(geom, effective=effective).constant
    return [m, mu, e0, e1, e1 - e0, qf, qwt, s], zero


def run_heatmap(cfg: ExperimentConfig, threads: int = 1) -> RunResult:
    if cfg.resolved_engine() == "ed":
        _ed_cap_check(cfg, cfg.geometry["num_sites"])
    L = cfg.make_geometry().ads_radius
    nm, nmu = cfg.sweep["grid"]
    mL = np.linspace(*cfg.sweep["mL_range"], int(nm))
    muL = np.linspace(*cfg.sweep["muL_range"], int(nmu))
    jobs = [(cfg, float(x / L), float(y / L)) for x in mL for y in muL]
    out = _pmap(_heatmap_point, jobs, threads)
    cols = ["m", "mu", "E0", "E1", "gap", "q_flat", "q_weighted", "s_ee_half"]
    n_zero = sum(z for _, z in out)
    return RunResult({"heatmap": Table(cols, [r for r, _ in out])},
                     {"degenerate_points": int(n_zero)})


# -- entanglement -----------------------------------------------------------


def _ee_point(job):
    cfg, n, m = job
    geom = cfg.make_geometry(num_sites=n)
    params = cfg.make_params(mass=m)
    cuts = [n // 2] if cfg.sweep["cuts"] == "half" else list(range(1, n))
    if cfg.resolved_engine() == "ff":
        C = ff.correlation_matrix(ff.diagonalize_modes(build_single_particle(geom, params)))
        vals = [ff.entanglement_from_correlation(C, l) for l in cuts]
    else:
        _ed_cap_check(cfg, n)
        psi = ed.ground_state(build_spin_hamiltonian(geom, params))
        vals = [ed.entanglement_entropy(psi, l) for l in cuts]
    return [[n, geom.horizon_radius, m, l, v] for l, v in zip(cuts, vals)]


def run_ee(cfg, threads=1):
    L = cfg.make_geometry().ads_radius
    jobs = [(cfg, int(n), float(x / L)) for n in cfg.sweep["num_sites"] for x in cfg.sweep["mL"]]
    rows = [r for block in _pmap(_ee_point, jobs, threads) for r in block]
    return RunResult({"ee": Table(["num_sites", "horizon_radius", "m", "ell", "s_ee"], rows)})


# -- gap --------------------------------------------------------------------


def _gap_point(job):
    cfg, n, rh, m = job
    geom = cfg.make_geometry(num_sites=n, horizon_radius=rh)
    params = cfg.make_params(mass=m)
    if cfg.resolved_engine() == "ff":
        modes = ff.diagonalize_modes(build_single_particle(geom, params))
        e0, e1 = ff.ground_energy(modes), ff.first_excited_energy(modes)
    else:
        _ed_cap_check(cfg, n)
        low = ed.ground_and_first_excited(build_spin_hamiltonian(geom, params))
        e0, e1 = low.e0, low.e1
    mu = params.chem_potential
    gap = e1 - e0
    ratio = gap / abs(m) if m != 0 else float("nan")
    return [n, rh, m, mu, e0, e1, gap, ratio, gap_large_mass(geom, m, mu)]


def run_gap(cfg, threads=1):
    jobs = []
    for n in cfg.sweep["num_sites"]:
        for rh in cfg.sweep["horizon_radius"]:
            r = float(rh) * n if cfg.sweep["horizon_over_N"] else float(rh)
            for m in cfg.sweep["mass"]:
                jobs.append((cfg, int(n), r, float(m)))
    rows = _pmap(_gap_point, jobs, threads)
    cols = ["num_sites", "horizon_radius", "m", "mu", "E0", "E1", "gap", "gap_over_m",
            "gap_large_mass"]
    return RunResult({"gap": Table(cols, rows)})


# -- chirality --------------------------------------------------------------


def _chirality_point(job):
    cfg, n = job
    geom = cfg.make_geometry(num_sites=n)
    params = cfg.make_params()
    if cfg.resolved_engine() == "ff":
        C = ff.correlation_matrix(ff.diagonalize_modes(build_single_particle(geom, params)))
        kap = [ff.expectation(C, operator_kappa(geom, i)) for i in range(1, n)]
        chi = [ff.expectation(C, operator_chi(geom, i)) for i in range(1, n - 1)]
    else:
        _ed_cap_check(cfg, n)
        psi = ed.ground_state(build_spin_hamiltonian(geom, params))
        kap = [ed.expectation(psi, operator_kappa(geom, i)) for i in range(1, n)]
        chi = [ed.expectation(psi, operator_chi(geom, i)) for i in range(1, n - 1)]
    return n, kap, chi


def run_chirality(cfg, threads=1):
    out = _pmap(_chirality_point, [(cfg, int(n)) for n in cfg.sweep["num_sites"]], threads)
    summary, profile = [], []
    for n, kap, chi in out:
        summary.append([n, float(np.mean(kap)), float(np.mean(chi)), float(np.sum(kap))])
        chi_pad = list(chi) + [float("nan")]  # chi lives on triples 1..N-2
        profile += [[n, i, k, c] for i, (k, c) in enumerate(zip(kap, chi_pad), start=1)]
    return RunResult({
        "chirality": Table(["num_sites", "kappa_mean", "chi_mean", "J"], summary),
        "chirality_profile": Table(["num_sites", "bond", "kappa", "chi"], profile),
    })


# -- real-time --------------------------------------------------------------


def _current_point(job):
    cfg, rh, m = job
    geom = cfg.make_geometry(horizon_radius=rh)
    _ed_cap_check(cfg, geom.num_sites)
    sw = cfg.sweep
    times = dyn.default_times(sw["t_max"], int(sw["n_times"]))
    s = dyn.current_evolution(geom, cfg.make_params(mass=m), times, sw["weighted"], sw["initial"])
    return rh, m, s


def run_current(cfg, threads=1):
    jobs = [(cfg, float(rh), float(m)) for rh in cfg.sweep["horizon_radius"]
            for m in cfg.sweep["mass"]]
    rows, summary = [], []
    for rh, m, s in _pmap(_current_point, jobs, threads):
        v = s.mean
        rows += [[rh, m, t, x] for t, x in zip(s.times, v)]
        summary.append([rh, m, v[0], dyn.envelope(v), dyn.dominant_frequency(s.times, v)])
    return RunResult({
        "current": Table(["horizon_radius", "m", "t", "value"], rows),
        "current_summary": Table(["horizon_radius", "m", "value_0", "envelope", "frequency"],
                                 summary),
    })


def _otoc_point(job):
    cfg, rh, m = job
    geom = cfg.make_geometry(horizon_radius=rh)
    _ed_cap_check(cfg, geom.num_sites)
    sw = cfg.sweep
    times = np.linspace(0.0, sw["t_max"], int(sw["n_times"]))
    i, j = sw["bonds"]
    H = build_spin_hamiltonian(geom, cfg.make_params(mass=m))
    return rh, m, times, ed.otoc(H, int(i), int(j), times, reference=sw["reference"])


def run_otoc(cfg, threads=1):
    jobs = [(cfg, float(rh), float(m)) for rh in cfg.sweep["horizon_radius"]
            for m in cfg.sweep["mass"]]
    rows, summary = [], []
    for rh, m, t, c in _pmap(_otoc_point, jobs, threads):
        rows += [[rh, m, tt, z.real, z.imag] for tt, z in zip(t, c)]
        summary.append([rh, m, c[0].real, c[0].imag, float(c.real.min()),
                        dyn.half_decay_time(t, c.real)])
    return RunResult({
        "otoc": Table(["horizon_radius", "m", "t", "re", "im"], rows),
        "otoc_summary": Table(["horizon_radius", "m", "c0_re", "c0_im", "min_re", "half_time"],
                              summary),
    })


# -- level statistics -------------------------------------------------------


def _rstats_point(job):
    cfg, rh, m = job
    geom = cfg.make_geometry(horizon_radius=rh)
    _ed_cap_check(cfg, geom.num_sites)
    sw = cfg.sweep
    params = cfg.make_params(mass=m)
    spec = ed.eigensolve(build_spin_hamiltonian(geom, params), vectors=False)
    by_q = spec.levels_by_charge()
    rs = spectral.r_statistics(by_q, poly_degree=int(sw["poly_degree"]),
                               min_levels=int(sw["min_levels"]))
    pooled = np.concatenate([spectral.unfold(v, int(sw["poly_degree"])).spacings
                             for q, v in sorted(by_q.items()) if len(v) >= int(sw["min_levels"])])
    pooled = pooled / pooled.mean()
    bf = spectral.brody_fit(pooled, sw["brody_method"])
    p0 = spectral.delta_of_zero_spacing_fraction(pooled)
    return rh, m, params.chem_potential, rs, bf, p0, len(spec.eigenvalues)


def run_rstats(cfg, threads=1):
    jobs = [(cfg, float(rh), float(m)) for rh in cfg.sweep["horizon_radius"]
            for m in cfg.sweep["mass"]]
    rows, hist, sectors = [], [], []
    for rh, m, mu, rs, bf, p0, n_lv in _pmap(_rstats_point, jobs, threads):
        rows.append([rh, m, mu, rs.weighted_mean, bf.beta, bf.fit_error, p0, n_lv])
        edges, dens = bf.histogram
        hist += [[rh, m, lo, hi, d] for lo, hi, d in zip(edges[:-1], edges[1:], dens)]
        sectors += [[rh, m, q, r, M] for q, (r, M) in sorted(rs.per_sector.items())]
    return RunResult({
        "rstats": Table(["horizon_radius", "m", "mu", "r_mean", "beta", "beta_err", "p0",
                         "n_levels"], rows),
        "rstats_histogram": Table(["horizon_radius", "m", "s_lo", "s_hi", "density"], hist),
        "rstats_sectors": Table(["horizon_radius", "m", "q", "r_mean", "M_q"], sectors),
    })


# -- disorder quench --------------------------------------------------------


def run_quench(cfg, threads=1):
    sw = cfg.sweep
    times = dyn.default_times(sw["t_max"], int(sw["n_times"]))
    params = cfg.make_params()
    rows, per, frozen = [], [], []
    for W in sw["disorder_width"]:
        for rh in sw["horizon_radius"]:
            geom = cfg.make_geometry(horizon_radius=float(rh))
            _ed_cap_check(cfg, geom.num_sites)
            s = dyn.quench_imbalance(geom, params, float(W), int(sw["n_samples"]), times,
                                     bool(sw["weighted"]), workers=threads)
            rows += [[W, rh, t, a, b] for t, a, b in zip(s.times, s.mean, s.stddev)]
            for k in range(s.n_samples):
                per += [[W, rh, k, t, v] for t, v in zip(s.times, s.per_sample[k])]
            fm = dyn.frozen_memory(s, float(sw["tail_fraction"]))
            frozen.append([W, rh, fm.value, fm.stderr, fm.window[0], fm.window[1]])
    return RunResult({
        "quench": Table(["W", "horizon_radius", "t", "mean", "std"], rows),
        "quench_samples": Table(["W", "horizon_radius", "sample", "t", "value"], per),
        "frozen_memory": Table(["W", "horizon_radius", "I_inf", "stderr", "T1", "T2"], frozen),
    })


# -- continuum scaling ------------------------------------------------------


def _continuum_point(job):
    cfg, n = job
    g0 = cfg.make_geometry()
    geom = LatticeGeometry.continuum_scaled(n, g0.ads_radius, g0.horizon_radius)
    params = cfg.make_params()
    modes = ff.diagonalize_modes(build_single_particle(geom, params))
    C = ff.correlation_matrix(modes)
    q, qw = ff.charge_profiles(C, geom, effective=params.redshift == "effective")
    return [n, geom.spacing, float(q.sum()), float(qw.sum()), geom.spacing * float(qw.sum()),
            ff.ground_energy(modes)]


def run_continuum(cfg, threads=1):
    rows = _pmap(_continuum_point, [(cfg, int(n)) for n in cfg.sweep["num_sites"]], threads)
    return RunResult({"continuum": Table(
        ["num_sites", "spacing", "Q_flat", "Q_weighted", "aQ_weighted", "E0"], rows)})


def run_spectrum(cfg, threads=1):
    geom = cfg.make_geometry()
    _ed_cap_check(cfg, geom.num_sites)
    spec = ed.eigensolve(build_spin_hamiltonian(geom, cfg.make_params()), vectors=False)
    rows = [[i, e, q] for i, (e, q) in enumerate(zip(spec.eigenvalues, spec.sector_labels))]
    return RunResult({"spectrum": Table(["index", "energy", "charge"], rows)})


RUNNERS = {
    "spectrum": run_spectrum,
    "heatmap": run_heatmap,
    "ee": run_ee,
    "gap": run_gap,
    "chirality": run_chirality,
    "current": run_current,
    "otoc": run_otoc,
    "rstats": run_rstats,
    "quench": run_quench,
    "continuum": run_continuum,
}
