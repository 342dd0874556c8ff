"""Named presets, one per published figure.

Each preset is plain TOML so ``ads2chain preset <name> > cfg.toml`` gives an
editable starting point. Grid resolutions and time-step counts that the
figure captions leave open are fixed here explicitly.
"""

from __future__ import annotations

PRESETS = {
    "fig-e0-heatmap": """\
name = "fig-e0-heatmap"
experiment = "heatmap"
engine = "ff"

[geometry]
num_sites = 12
horizon_radius = 1.0
ads_radius = 1.0

[sweep]
mL_range = [-10.0, 10.0]
muL_range = [-10.0, 10.0]
grid = [41, 41]
energy_convention = "traceless"
""",
    "fig-gap": """\
name = "fig-gap"
experiment = "gap"
engine = "ff"

[geometry]
ads_radius = 1.0

[model]
chem_potential = 0.0

[sweep]
num_sites = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100]
horizon_radius = [0.2, 0.1]
horizon_over_N = true
mass = [1.0, 10.0, 100.0]
""",
    "fig-ee-mass-scan": """\
name = "fig-ee-mass-scan"
experiment = "ee"
engine = "ff"

[geometry]
horizon_radius = 1.0
ads_radius = 1.0

[sweep]
num_sites = [12, 16, 20]
mL = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0]
cuts = "all"
""",
    "fig-chirality-n": """\
name = "fig-chirality-n"
experiment = "chirality"
engine = "ff"

[geometry]
horizon_radius = 0.0
ads_radius = 1.0

[sweep]
num_sites = [20, 40, 80]
""",
    "fig-otoc": """\
name = "fig-otoc"
experiment = "otoc"
engine = "ed"

[geometry]
num_sites = 12
ads_radius = 1.0

[model]
chem_potential = 0.1

[sweep]
horizon_radius = [0.0, 2.0]
mass = [0.5, 1.0, 10.0]
bonds = [4, 8]
t_max = 20.0
n_times = 2001
reference = "ground"
""",
    "fig-rstats": """\
name = "fig-rstats"
experiment = "rstats"
engine = "ed"

[geometry]
num_sites = 12
ads_radius = 1.0

[model]
chem_potential = 0.1

[sweep]
horizon_radius = [1.0, 2.0]
mass = [0.0, 0.5, 1.0]
""",
    "fig-mbl-flat": """\
name = "fig-mbl-flat"
experiment = "quench"
engine = "ed"

[geometry]
num_sites = 10
horizon_radius = 1.0
ads_radius = 1.0

[model]
mass = 0.25
chem_potential = 0.1
seed = 2024
redshift = "effective"

[sweep]
disorder_width = [0.0, 0.4, 5.0]
horizon_radius = [1.0]
n_samples = 100
t_max = 50.0
n_times = 200
weighted = false
""",
    "fig-mbl-weighted": """\
name = "fig-mbl-weighted"
experiment = "quench"
engine = "ed"

[geometry]
num_sites = 10
horizon_radius = 1.0
ads_radius = 1.0

[model]
mass = 0.25
chem_potential = 0.1
seed = 2024
redshift = "raw"

[sweep]
disorder_width = [1.0, 2.5, 5.0]
horizon_radius = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0]
n_samples = 100
t_max = 50.0
n_times = 200
weighted = true
""",
    "fig-continuum": """\
name = "fig-continuum"
experiment = "continuum"
engine = "ff"

[geometry]
horizon_radius = 10.0
ads_radius = 1.0

[model]
mass = 0.0
chem_potential = 0.0

[sweep]
num_sites = [64, 144, 256]
""",
}


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
