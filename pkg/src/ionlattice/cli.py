"""Command line interface.

All frequencies and temperatures cross this boundary in reduced units:
trap frequencies (including the axial ``nu``) in units of
sqrt(Q^2 / (m a^3)) and temperatures in units of half that. Conversion to
the raw internal units happens exactly once, when a command's inputs are
resolved; outputs are converted back at emission. Lengths are reported in
units of the lattice spacing. Witness energies are reported in the
frequency unit (hbar = 1).

Exit codes: 0 success, 1 check-suite failure, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .covariance import (
    block_covariance,
    direct_covariance_oracle,
    pair_moments,
    td_pair_criteria,
    td_single_site_eigenvalue,
)
from .entanglement import (
    block_entropy,
    negativity,
    separability_criteria,
    symplectic_spectrum,
    von_neumann_entropy,
)
from .errors import (
    ConfigError,
    DegenerateCoupling,
    DomainError,
    ImaginaryFrequency,
    NoConvergence,
    NumericalFailure,
    QuadratureFailure,
)
from .lattice import (
    LatticeParams,
    Model,
    Variant,
    critical_potential,
    solve_equilibrium,
)
from .quadrature import Divergent
from .spectrum import OMEGA4, build_spectrum, coupling_matrix, symplectic_diagonalize
from .witness import witness_report

#: Ring size standing in for the bulk limit where no closed form exists.
TD_PROXY_N = 4096

MEASURES = (
    "negativity",
    "entropy",
    "blockEntropy1",
    "blockEntropy2",
    "blockEntropy3",
    "witness",
    "spectrum",
)
DEFAULT_MEASURES = ("negativity", "entropy")

COLUMNS = (
    "nuT",
    "T",
    "configVariant",
    "b",
    "S1x",
    "S2x",
    "S1y",
    "S2y",
    "ENx",
    "ENy",
    "SV1x",
    "SV1y",
    "SV2x",
    "SV2y",
    "SV3x",
    "SV3y",
    "U",
    "bound",
    "Tc",
    "witnessTriggered",
    "SV1xDivergent",
    "SV1yDivergent",
    "SV2xDivergent",
    "SV2yDivergent",
    "SV3xDivergent",
    "SV3yDivergent",
    "error",
)

_ROW_ERRORS = (
    ImaginaryFrequency,
    DomainError,
    NoConvergence,
    QuadratureFailure,
    NumericalFailure,
    DegenerateCoupling,
)


@dataclass(frozen=True)
class SweepSpec:
    """A resolved sweep: raw-unit parameters plus reduced-unit grids."""

    params: LatticeParams
    nu_t_grid: tuple
    temperatures: tuple
    measures: tuple = DEFAULT_MEASURES
    td_limit: bool = False
    xy_mode: str = "signed"

    def __post_init__(self):
        for name, grid in (("nuT", self.nu_t_grid), ("temperature", self.temperatures)):
            if not grid:
                raise ConfigError(f"{name} grid must not be empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{name} grid must be strictly increasing")
        bad = [m for m in self.measures if m not in MEASURES]
        if bad:
            raise ConfigError(f"unknown measures {bad}; choose from {MEASURES}")
        if not self.measures:
            raise ConfigError("at least one measure is required")
        if self.td_limit and tuple(self.temperatures) != (0.0,):
            raise ConfigError("the bulk limit is implemented for temperature 0 only")
        if any(t < 0 for t in self.temperatures):
            raise ConfigError("temperatures must be non-negative")
        if self.params.charge <= 0:
            raise ConfigError("reduced units require a positive charge")


def _block_sizes(measures) -> tuple:
    sizes = []
    if "entropy" in measures or "blockEntropy1" in measures:
        sizes.append(1)
    for k in (2, 3):
        if f"blockEntropy{k}" in measures:
            sizes.append(k)
    return tuple(sizes)


def _finite_entropy(params, nu_t, temperature, size, direction):
    """(entropy or None, divergent flag) for one block column."""
    cov = block_covariance(
        params, nu_t, temperature, sites=range(1, size + 1), directions=(direction,)
    )
    if not np.isfinite(cov.matrix).all():
        return None, True
    rep = block_entropy(cov, n_sites=size, direction=direction)
    if math.isinf(rep.entropy):
        return None, True
    return rep.entropy, False


def _compute_row(spec: SweepSpec, nu_t_paper: float, t_paper: float) -> dict:
    row = {c: None for c in COLUMNS}
    row["nuT"] = nu_t_paper
    row["T"] = t_paper
    for c in COLUMNS:
        if c.endswith("Divergent"):
            row[c] = False
    row["error"] = ""
    params = spec.params
    unit = params.nu_t_unit
    t_unit = params.temperature_unit
    nu_t = nu_t_paper * unit
    temperature = t_paper * t_unit
    try:
        if spec.td_limit:
            _td_row(spec, nu_t, row)
        else:
            _finite_row(spec, params, nu_t, temperature, row)
    except _ROW_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _finite_row(spec, params, nu_t, temperature, row, entropy_params=None):
    unit = params.nu_t_unit
    t_unit = params.temperature_unit
    config = solve_equilibrium(params, nu_t)
    row["configVariant"] = config.variant.value
    row["b"] = config.b / params.spacing
    if "spectrum" in spec.measures:
        build_spectrum(params, nu_t)
    if "negativity" in spec.measures:
        for d in ("x", "y"):
            pm = pair_moments(params, nu_t, temperature, 1, d)
            s1, s2 = separability_criteria(pm)
            row[f"S1{d}"] = s1
            row[f"S2{d}"] = s2
            row[f"EN{d}"] = negativity(s1, s2)
    ent_params = entropy_params or params
    for size in _block_sizes(spec.measures):
        for d in ("x", "y"):
            val, div = _finite_entropy(ent_params, nu_t, temperature, size, d)
            row[f"SV{size}{d}"] = val
            row[f"SV{size}{d}Divergent"] = div
    if "witness" in spec.measures:
        rep = witness_report(params, nu_t, temperature, xy_mode=spec.xy_mode)
        row["U"] = rep.internal_energy / unit
        row["bound"] = rep.bound / unit
        row["Tc"] = None if rep.critical_temperature is None else rep.critical_temperature / t_unit
        row["witnessTriggered"] = rep.triggered


def _td_row(spec: SweepSpec, nu_t: float, row: dict):
    """Bulk-limit row: dispersion averages where the flat closed forms hold,
    a large-ring stand-in (n = TD_PROXY_N) everywhere else."""
    params = spec.params
    crit = critical_potential(params, td_limit=True)
    proxy = dataclasses.replace(params, n=TD_PROXY_N)
    flat = nu_t >= crit * (1.0 - 1e-12)
    if flat:
        row["configVariant"] = Variant.LINEAR.value
        row["b"] = 0.0
        if "negativity" in spec.measures:
            for d in ("x", "y"):
                s1, s2 = td_pair_criteria(params, nu_t, 1, d)
                row[f"S1{d}"] = s1
                row[f"S2{d}"] = s2
                row[f"EN{d}"] = negativity(s1, s2)
        if 1 in _block_sizes(spec.measures):
            for d in ("x", "y"):
                r = td_single_site_eigenvalue(params, nu_t, d)
                if isinstance(r, Divergent):
                    row[f"SV1{d}"] = None
                    row[f"SV1{d}Divergent"] = True
                else:
                    row[f"SV1{d}"] = von_neumann_entropy(r)
        for size in _block_sizes(spec.measures):
            if size == 1:
                continue
            for d in ("x", "y"):
                val, div = _finite_entropy(proxy, nu_t, 0.0, size, d)
                row[f"SV{size}{d}"] = val
                row[f"SV{size}{d}Divergent"] = div
        if "witness" in spec.measures:
            _witness_into_row(spec, proxy, nu_t, row)
        if "spectrum" in spec.measures:
            build_spectrum(proxy, nu_t)
    else:
        # below the buckling point only the large-ring stand-in is available
        sub = dataclasses.replace(spec, params=proxy, td_limit=False)
        _finite_row(sub, proxy, nu_t, 0.0, row)


def _witness_into_row(spec, params, nu_t, row):
    rep = witness_report(params, nu_t, 0.0, xy_mode=spec.xy_mode)
    unit = params.nu_t_unit
    row["U"] = rep.internal_energy / unit
    row["bound"] = rep.bound / unit
    row["Tc"] = None if rep.critical_temperature is None else rep.critical_temperature / params.temperature_unit
    row["witnessTriggered"] = rep.triggered


def _row_worker(task):
    spec, nu_t_paper, t_paper = task
    return _compute_row(spec, nu_t_paper, t_paper)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list:
    """All sweep rows in grid order (outer nuT, inner temperature)."""
    tasks = [(spec, nt, t) for nt in spec.nu_t_grid for t in spec.temperatures]
    if jobs <= 1 or len(tasks) == 1:
        return [_row_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_row_worker, tasks))


# ---------------------------------------------------------------- formatting


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _json_cell(value):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return float(f"{value:.12g}")
    return value


def rows_to_csv(rows, columns=COLUMNS) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def rows_to_json(rows, columns=COLUMNS) -> str:
    payload = [{c: _json_cell(row[c]) for c in columns} for row in rows]
    return json.dumps({"rows": payload}, indent=2) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------- parsing


def _parse_grid(text: str) -> tuple:
    """Comma list ("0.9,1.0") or linspace ("0.5:2.0:16")."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ConfigError(f"grid range must be start:stop:count, got {text!r}")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ConfigError("grid count must be positive")
            if count == 1:
                return (start,)
            return tuple(np.linspace(start, stop, count).tolist())
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid {text!r}: {exc}") from None


def _params_from_mapping(raw: dict) -> LatticeParams:
    known = {"n", "mass", "charge", "spacing", "nu", "model", "tauMax"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown parameter keys {sorted(extra)}")
    try:
        model = Model[str(raw.get("model", "NN")).upper()]
    except KeyError:
        raise ConfigError(f"model must be NN or LR, got {raw.get('model')!r}") from None
    mass = float(raw.get("mass", 1.0))
    charge = float(raw.get("charge", 1.0))
    spacing = float(raw.get("spacing", 1.0))
    if charge <= 0 or mass <= 0 or spacing <= 0:
        raise ConfigError("mass, charge and spacing must be positive")
    unit = math.sqrt(charge**2 / (mass * spacing**3))
    nu_paper = float(raw.get("nu", 1.0))
    tau_max = raw.get("tauMax")
    return LatticeParams(
        n=int(raw.get("n", 20)),
        mass=mass,
        charge=charge,
        spacing=spacing,
        nu=nu_paper * unit,
        model=model,
        tau_max=None if tau_max is None else int(tau_max),
    )


def _spec_from_args(args) -> SweepSpec:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    raw_params = dict(cfg.get("params", {}))
    for key, attr in (
        ("n", "n"),
        ("mass", "mass"),
        ("charge", "charge"),
        ("spacing", "spacing"),
        ("nu", "nu"),
        ("model", "model"),
        ("tauMax", "tau_max"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            raw_params[key] = val
    params = _params_from_mapping(raw_params)

    nu_t_grid = cfg.get("nuTGrid")
    if getattr(args, "nu_t", None) is not None:
        nu_t_grid = _parse_grid(args.nu_t)
    if nu_t_grid is None:
        raise ConfigError("a nuT grid is required (--nu-t or config nuTGrid)")
    temperatures = cfg.get("temperatures", [0.0])
    if getattr(args, "temp", None) is not None:
        temperatures = _parse_grid(args.temp)
    measures = cfg.get("measures", list(DEFAULT_MEASURES))
    if getattr(args, "measures", None):
        measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    td_limit = bool(cfg.get("tdLimit", False))
    if getattr(args, "td_limit", False):
        td_limit = True
    xy_mode = cfg.get("xyMode", "signed")
    if getattr(args, "xy_mode", None):
        xy_mode = args.xy_mode
    return SweepSpec(
        params=params,
        nu_t_grid=tuple(float(v) for v in nu_t_grid),
        temperatures=tuple(float(v) for v in temperatures),
        measures=tuple(measures),
        td_limit=td_limit,
        xy_mode=xy_mode,
    )


def _add_param_flags(sub, with_nu_t_grid: bool):
    sub.add_argument("--config", help="JSON file with params and grids")
    sub.add_argument("--n", type=int, help="number of sites")
    sub.add_argument("--mass", type=float)
    sub.add_argument("--charge", type=float)
    sub.add_argument("--spacing", type=float)
    sub.add_argument("--nu", type=float, help="axial trap frequency, reduced units")
    sub.add_argument("--model", choices=["NN", "LR", "nn", "lr"])
    sub.add_argument("--tau-max", dest="tau_max", type=int)
    if with_nu_t_grid:
        sub.add_argument("--nu-t", dest="nu_t", help="grid: comma list or start:stop:count")
    else:
        sub.add_argument("--nu-t", dest="nu_t", type=float, required=True,
                         help="transverse trap frequency, reduced units")
    sub.add_argument("--out", help="output path (default stdout)")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")


def _single_params(args) -> LatticeParams:
    raw = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            raw = dict(json.load(fh).get("params", {}))
    for key, attr in (
        ("n", "n"), ("mass", "mass"), ("charge", "charge"), ("spacing", "spacing"),
        ("nu", "nu"), ("model", "model"), ("tauMax", "tau_max"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            raw[key] = val
    return _params_from_mapping(raw)


# --------------------------------------------------------------- subcommands


def _cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    rows = run_sweep(spec, jobs=args.jobs)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    _emit(text, args.out)
    return 0


def _cmd_spectrum(args) -> int:
    params = _single_params(args)
    unit = params.nu_t_unit
    spec = build_spectrum(params, args.nu_t * unit)
    cols = ("l", "variant", "omegaX", "omegaY", "omegaV", "omegaW")
    rows = []
    for l in range(1, params.n + 1):
        row = dict.fromkeys(cols)
        row["l"] = l
        row["variant"] = spec.variant.value
        if spec.variant is Variant.LINEAR:
            row["omegaX"] = spec.omega_x[l - 1] / unit
            row["omegaY"] = spec.omega_y[l - 1] / unit
        else:
            row["omegaV"] = spec.omega_v[l - 1] / unit
            row["omegaW"] = spec.omega_w[l - 1] / unit
        rows.append(row)
    text = rows_to_csv(rows, cols) if args.format == "csv" else rows_to_json(rows, cols)
    _emit(text, args.out)
    return 0


def _cmd_block_entropy(args) -> int:
    params = _single_params(args)
    cov = block_covariance(
        params,
        args.nu_t * params.nu_t_unit,
        args.temp * params.temperature_unit,
        sites=range(1, args.sites + 1),
        directions=(args.direction,),
        drop_soft_modes=args.drop_soft_modes,
    )
    rep = block_entropy(cov, n_sites=args.sites, direction=args.direction)
    cols = ("nSites", "direction", "entropy", "spectrum", "droppedSoftModes")
    row = {
        "nSites": rep.n_sites,
        "direction": rep.direction,
        "entropy": rep.entropy,
        "spectrum": " ".join(f"{r:.12g}" for r in rep.spectrum),
        "droppedSoftModes": rep.dropped_soft_modes,
    }
    if args.format == "json":
        payload = dict(row)
        payload["spectrum"] = [_json_cell(float(r)) for r in rep.spectrum]
        payload["entropy"] = _json_cell(rep.entropy)
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(rows_to_csv([row], cols), args.out)
    return 0


def _cmd_witness(args) -> int:
    params = _single_params(args)
    unit = params.nu_t_unit
    rep = witness_report(
        params, args.nu_t * unit, args.temp * params.temperature_unit, xy_mode=args.xy_mode
    )
    row = {
        "omegaX": rep.omega_x / unit,
        "omegaY": rep.omega_y / unit,
        "omegaXY": rep.omega_xy / unit,
        "bound": rep.bound / unit,
        "U": rep.internal_energy / unit,
        "Tc": None if rep.critical_temperature is None else rep.critical_temperature / params.temperature_unit,
        "xyMode": rep.xy_mode,
        "triggered": rep.triggered,
    }
    cols = tuple(row)
    text = rows_to_csv([row], cols) if args.format == "csv" else rows_to_json([row], cols)
    _emit(text, args.out)
    return 0


def _cmd_covariance(args) -> int:
    params = _single_params(args)
    sites = tuple(int(s) for s in args.sites.split(","))
    directions = tuple(d.strip() for d in args.directions.split(",") if d.strip())
    cov = block_covariance(
        params,
        args.nu_t * params.nu_t_unit,
        args.temp * params.temperature_unit,
        sites=sites,
        directions=directions,
    )
    if args.dump:
        with open(args.dump, "w") as fh:
            for r in cov.matrix:
                fh.write(",".join(f"{v:.17g}" for v in r) + "\n")
    payload = {
        "modes": [[s, d] for s, d in cov.modes],
        "matrix": [[_json_cell(float(v)) for v in r] for r in cov.matrix],
    }
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = [",".join(f"{s}{d}" for s, d in cov.modes)]
        for r in cov.matrix:
            lines.append(",".join(_format_cell(float(v)) for v in r))
        _emit("\n".join(lines) + "\n", args.out)
    return 0


# -------------------------------------------------------------- check suite


def _check_oracle_equivalence():
    worst = 0.0
    for n in (4, 6, 8):
        params = LatticeParams(n=n, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
        crit = critical_potential(params)
        for fac in (1.5, 0.8):
            for t_paper in (0.0, 0.5):
                t = t_paper * params.temperature_unit
                a = block_covariance(params, fac * crit, t, sites=range(1, n + 1))
                b = direct_covariance_oracle(params, fac * crit, t)
                worst = max(worst, float(np.max(np.abs(a.matrix - b.matrix))))
    return worst < 1e-9, f"max deviation {worst:.3e}"


def _check_symplectic(corrupt: bool):
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    crit = critical_potential(params)
    nu_t = 0.8 * crit
    config = solve_equilibrium(params, nu_t)
    worst = 0.0
    for l in (1, params.n // 2, params.n):
        block = coupling_matrix(params, config, nu_t, l)
        wv, ww, smat = symplectic_diagonalize(block)
        if corrupt:
            smat = smat.copy()
            smat[0, 0] *= 1.001
        target = np.diag([wv / 2, wv / 2, ww / 2, ww / 2])
        worst = max(worst, float(np.max(np.abs(smat @ block @ smat.T - target))))
        worst = max(worst, float(np.max(np.abs(smat @ OMEGA4 @ smat.T - OMEGA4))))
    return worst < 1e-10, f"max residual {worst:.3e}"


def _check_purity():
    worst = 0.0
    for fac in (1.4, 0.8):
        params = LatticeParams(n=6, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
        nu_t = fac * critical_potential(params)
        cov = block_covariance(params, nu_t, 0.0, sites=range(1, 7))
        spec = symplectic_spectrum(cov)
        worst = max(worst, float(np.max(np.abs(spec - 1.0))))
    return worst < 1e-8, f"max |r - 1| = {worst:.3e}"


def _check_decoupling():
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    crit = critical_potential(params)
    details = []
    ok = True
    cov = block_covariance(params, 1.5 * crit, 0.0, sites=range(1, 9)).matrix
    n = 8
    cross = max(
        abs(cov[2 * (2 * (s1 - 1)), 2 * (2 * (s2 - 1) + 1)])
        for s1 in range(1, n + 1)
        for s2 in range(1, n + 1)
    )
    ok &= cross < 1e-10
    details.append(f"flat x-y max {cross:.2e}")
    covz = block_covariance(params, 0.8 * crit, 0.0, sites=range(1, 9)).matrix
    diag_cross = max(
        abs(covz[2 * (2 * (s - 1)), 2 * (2 * (s - 1) + 1)]) for s in range(1, n + 1)
    )
    ok &= diag_cross < 1e-12
    details.append(f"buckled same-site x-y max {diag_cross:.2e}")
    k = covz.shape[0] // 2
    qp = max(abs(covz[2 * i, 2 * j + 1]) for i in range(k) for j in range(k))
    ok &= qp == 0.0
    details.append(f"q-p max {qp:.2e}")
    return bool(ok), "; ".join(details)


def _check_uncertainty():
    params = LatticeParams(n=8, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    crit = critical_potential(params)
    worst = math.inf
    try:
        for fac in (1.5, 0.8):
            for t_paper in (0.0, 0.4):
                t = t_paper * params.temperature_unit
                for sites in ((1,), (1, 2), (1, 3, 5)):
                    cov = block_covariance(params, fac * crit, t, sites=sites)
                    spec = symplectic_spectrum(cov)
                    worst = min(worst, float(spec.min()))
    except DomainError as exc:
        return False, str(exc)
    return True, f"min eigenvalue {worst:.12f}"


def _check_odd_ring_rejection():
    params = LatticeParams(n=7, mass=2.0, charge=1.0, spacing=1.0, nu=1.0)
    crit = critical_potential(params, td_limit=True)
    try:
        solve_equilibrium(params, 0.8 * crit)
    except ConfigError as exc:
        msg = str(exc)
        return "even" in msg, f"rejected with: {msg}"
    return False, "odd ring accepted a buckled configuration"


def run_check_suite(corrupt_hook: bool = False) -> list:
    """(name, passed, detail) for every internal consistency check.

    ``corrupt_hook`` deliberately perturbs the normal-form matrix before the
    symplectic check so callers can confirm the suite has teeth.
    """
    return [
        ("oracle-equivalence", *_check_oracle_equivalence()),
        ("symplectic-normal-form", *_check_symplectic(corrupt_hook)),
        ("ground-state-purity", *_check_purity()),
        ("direction-decoupling", *_check_decoupling()),
        ("uncertainty-floor", *_check_uncertainty()),
        ("odd-ring-rejection", *_check_odd_ring_rejection()),
    ]


def _cmd_check(args) -> int:
    results = run_check_suite(corrupt_hook=args.corrupt_normal_form)
    failed = 0
    for name, ok, detail in results:
        status = "pass" if ok else "FAIL"
        print(f"{status}  {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


# --------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionlattice",
        description="Ring-trap oscillator chain: spectra, covariance, entanglement.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("sweep", help="tabulate measures over a nuT/T grid")
    _add_param_flags(sweep, with_nu_t_grid=True)
    sweep.add_argument("--temp", help="temperature grid, reduced units")
    sweep.add_argument("--measures", help=f"comma list from {','.join(MEASURES)}")
    sweep.add_argument("--td-limit", action="store_true", dest="td_limit",
                       help="bulk-limit evaluation (temperature grid must be [0])")
    sweep.add_argument("--xy-mode", choices=["signed", "absolute"])
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.set_defaults(func=_cmd_sweep)

    spectrum = subs.add_parser("spectrum", help="normal-mode frequencies at one point")
    _add_param_flags(spectrum, with_nu_t_grid=False)
    spectrum.set_defaults(func=_cmd_spectrum)

    blocke = subs.add_parser("block-entropy", help="entropy of a block of sites")
    _add_param_flags(blocke, with_nu_t_grid=False)
    blocke.add_argument("--temp", type=float, default=0.0)
    blocke.add_argument("--sites", type=int, default=1, help="block size")
    blocke.add_argument("--direction", choices=["x", "y"], default="y")
    blocke.add_argument("--drop-soft-modes", action="store_true")
    blocke.set_defaults(func=_cmd_block_entropy)

    witness = subs.add_parser("witness", help="energy witness at one point")
    _add_param_flags(witness, with_nu_t_grid=False)
    witness.add_argument("--temp", type=float, default=0.0)
    witness.add_argument("--xy-mode", choices=["signed", "absolute"], default="signed")
    witness.set_defaults(func=_cmd_witness)

    covariance = subs.add_parser("covariance", help="covariance matrix of chosen sites")
    _add_param_flags(covariance, with_nu_t_grid=False)
    covariance.add_argument("--temp", type=float, default=0.0)
    covariance.add_argument("--sites", default="1,2", help="comma list of site indices")
    covariance.add_argument("--directions", default="x,y")
    covariance.add_argument("--dump", help="write full-precision matrix to this path")
    covariance.set_defaults(func=_cmd_covariance)

    check = subs.add_parser("check", help="run the internal consistency suite")
    check.add_argument("--corrupt-normal-form", action="store_true",
                       help="negative control: break the normal form on purpose")
    check.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, NumericalFailure, NoConvergence, QuadratureFailure,
            ImaginaryFrequency, DegenerateCoupling) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
