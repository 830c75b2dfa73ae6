"""Declarative experiment runner.

One experiment per invocation: `conewave <subcommand> [--config file.json]
[--dotted.path value ...]`.  A single JSON document configures each
subcommand; flag overrides use dotted paths and win over file values.
Unknown keys fail validation before any computation or file output (exit 2);
numerical failures exit 3 naming the module; success exits 0 after writing
the declared artifacts atomically (temp + rename) with a one-line summary
per artifact.

The environment variable CONEWAVE_THREADS caps internal parallelism.  Every
operation in this package is implemented sequentially with deterministic
reductions, so any cap is a no-op and artifacts are byte-identical across
thread settings; the variable is still validated.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import diagnostics, geometry, plots, products, radial, wavesolver
from .errors import (
    ConewaveError,
    DivergenceError,
    InvalidArgumentError,
    PartialTrackError,
    ValidationError,
)
from .pseudofn import PseudofunctionKind, PseudofunctionSpec, xplusi0_spectrum
from .spectral import (
    SpectralFunction,
    SpectralGrid,
    grid_make,
    indicator_spectrum,
    sobolev_norm,
    write_spectrum_csv,
)

__all__ = ["main"]


# ---------------------------------------------------------------------------
# configuration plumbing


def _merge(base: dict, override: dict, path: str = "") -> list:
    """Merge override into base in place; return unknown key paths."""
    unknown = []
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            unknown.append(where)
            continue
        if isinstance(base[key], dict) and isinstance(value, dict):
            unknown.extend(_merge(base[key], value, where))
        else:
            base[key] = value
    return unknown


def _parse_overrides(tokens: list) -> dict:
    out: dict = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ValidationError(f"unexpected argument {tok!r}; overrides look like --a.b value")
        if "=" in tok:
            key, raw = tok[2:].split("=", 1)
            i += 1
        else:
            key = tok[2:]
            if i + 1 >= len(tokens):
                raise ValidationError(f"override --{key} is missing a value")
            raw = tokens[i + 1]
            i += 2
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def _load_config(defaults: dict, args) -> dict:
    config = copy.deepcopy(defaults)
    unknown = []
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"config {args.config}: invalid JSON ({exc})")
        if not isinstance(file_cfg, dict):
            raise ValidationError("config document must be a JSON object")
        unknown.extend(_merge(config, file_cfg))
    unknown.extend(_merge(config, _parse_overrides(args.overrides)))
    if unknown:
        raise ValidationError("unknown configuration keys: " + ", ".join(sorted(unknown)))
    return config


def _config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _Artifacts:
    """Collects rendered artifact texts, then writes them all atomically."""

    def __init__(self, directory: str):
        self.directory = directory
        self.pending: list = []

    def add(self, name: str, text: str) -> str:
        path = os.path.join(self.directory, name)
        self.pending.append((path, text))
        return path

    def add_file_writer(self, name: str, writer) -> str:
        import io

        buf = io.StringIO()

        class _Sink:
            def write(sink_self, s):
                buf.write(s)

        # writers in this package accept a path; render via a temp file
        path = os.path.join(self.directory, name)
        fd, tmp = tempfile.mkstemp(suffix=".render")
        os.close(fd)
        try:
            writer(tmp)
            with open(tmp, "r", encoding="ascii") as fh:
                text = fh.read()
        finally:
            os.unlink(tmp)
        self.pending.append((path, text))
        return path

    def flush(self) -> list:
        written = []
        for path, text in self.pending:
            _atomic_write(path, text)
            written.append((path, text.count("\n")))
        return written


def _grid_from(config: dict) -> SpectralGrid:
    return grid_make(float(config["cutoff"]), int(config["bins"]))


def _spectrum_from(node: dict, grid: SpectralGrid) -> SpectralFunction:
    kind = node["kind"]
    if kind == "pseudofn":
        return xplusi0_spectrum(float(node["lambda"]), grid)
    if kind == "indicator":
        return indicator_spectrum(grid, float(node["width"]))
    if kind == "exp":
        rate = float(node["rate"])
        edges = grid.edges()
        cells = (np.exp(-rate * edges[:-1]) - np.exp(-rate * edges[1:])) / (rate * grid.dxi)
        return SpectralFunction(grid, cells)
    raise ValidationError(f"unknown spectrum kind {kind!r} (pseudofn|indicator|exp)")


def _boost_from(c: float, sign: str) -> geometry.BoostSpec:
    if abs(c) == 1.0:
        raise ValidationError("|c| = 1 is on the light cone; no boost exists")
    if abs(c) < 1.0:
        return geometry.BoostSpec(c, geometry.Regime.INSIDE)
    s = geometry.Sign.PLUS if sign == "plus" else geometry.Sign.MINUS
    return geometry.BoostSpec(abs(c), geometry.Regime.OUTSIDE, s)


# ---------------------------------------------------------------------------
# subcommand runners: validate, compute, stage artifacts, report summaries


def _run_pseudofn(config, artifacts):
    grid = _grid_from(config["grid"])
    spec = xplusi0_spectrum(float(config["lambda"]), grid)
    path = artifacts.add_file_writer("spectrum.csv", lambda p: write_spectrum_csv(spec, p))
    return [f"pseudofn lambda={config['lambda']} bins={grid.bins}"], [("spectrum", path)]


def _run_product(config, artifacts):
    grid = _grid_from(config["grid"])
    lam_f, lam_g = float(config["lambda_f"]), float(config["lambda_g"])
    f = xplusi0_spectrum(lam_f, grid)
    g = xplusi0_spectrum(lam_g, grid)
    fg = products.fourier_product(f, g)
    ref = xplusi0_spectrum(lam_f + lam_g, grid)
    diff = SpectralFunction(grid, fg.samples - ref.samples)
    num = sobolev_norm(diff, 0.0, upper=fg.trust)
    scale = sobolev_norm(ref, 0.0, upper=fg.trust)
    path = artifacts.add_file_writer("product.csv", lambda p: write_spectrum_csv(fg, p))
    rel = num / scale if scale > 0 else math.inf
    return [f"product deviation_vs_closed_form={rel:.3e} trust={fg.trust}"], [("spectrum", path)]


def _run_norm_probe(config, artifacts):
    grid = _grid_from(config["grid"])
    report = products.norm_probe(
        lambda g: _spectrum_from(config["f"], g),
        lambda g: _spectrum_from(config["g"], g),
        float(config["s1"]),
        float(config["s2"]),
        float(config["sigma"]),
        grid,
        int(config["refinements"]),
    )
    path = artifacts.add_file_writer("probe.csv", lambda p: products.write_probe_csv(report, p))
    return [f"norm-probe verdict={report.verdict}"], [(None, path)]


def _run_bounds(config, artifacts):
    lines = ["p,wellposed_s_min,sobolev_s_min"]
    summaries = []
    for p in config["p_values"]:
        p = int(p)
        wmin = products.wellposed_s_min(p)
        smin = products.sobolev_s_min(p)
        lines.append(f"{p},{wmin},{smin}")
        summaries.append(f"bounds p={p}: wellposed_s_min={wmin} s_sob={smin}")
    path = artifacts.add("bounds.csv", "\n".join(lines) + "\n")
    return summaries, [(None, path)]


def _run_solve(config, artifacts):
    grid = _grid_from(config["grid"])
    p = int(config["p"])
    kappa = float(config["kappa"])
    data_cfg = config["data"]
    if data_cfg["preset"] == "stationary":
        params = radial.stationary_params_nd(p, 1)
        u0 = xplusi0_spectrum(float(params.lam), grid)
        data = wavesolver.CauchyData.rest(u0)
    else:
        data = wavesolver.CauchyData.rest(_spectrum_from(data_cfg, grid))
    field, report = wavesolver.picard_solve(
        data,
        p,
        kappa,
        float(config["T"]),
        int(config["nt"]),
        float(config["tol"]),
        int(config["max_iter"]),
        norm_s=float(config["norm_s"]),
    )
    prof = wavesolver.residual_profile(field, p, kappa, sigma=float(config["sigma"]))
    res_lines = ["t,residual"]
    for t, r in zip(field.times[1:-1], prof):
        res_lines.append(f"{repr(float(t))},{repr(float(r))}")
    paths = [
        (None, artifacts.add("report.txt", report.to_text())),
        (None, artifacts.add_file_writer("ratios.csv", report.write_ratios_csv)),
        ("spacetime-heat", artifacts.add_file_writer(
            "field.csv", lambda pth: wavesolver.write_field_csv(field, pth))),
        (None, artifacts.add("residual.csv", "\n".join(res_lines) + "\n")),
    ]
    summary = (
        f"solve p={p} kappa={kappa}: converged={report.converged} "
        f"iterations={report.iterations} max_residual={prof.max():.3e}"
    )
    if not report.converged:
        summary += " (non-convergence flagged)"
    return [summary] + [f"warning: {w}" for w in report.warnings], paths


def _run_stationary_check(config, artifacts):
    grid = _grid_from(config["grid"])
    p = int(config["p"])
    params = radial.stationary_params_nd(p, 1)
    lam, kappa = float(params.lam), float(params.kappa)
    u0 = xplusi0_spectrum(lam, grid)
    data = wavesolver.CauchyData.rest(u0)
    times = np.linspace(0.0, float(config["T"]), int(config["nt"]) + 1)
    field = wavesolver.constant_field(u0, times)
    mapped = wavesolver.duhamel_apply(field, data, p, kappa)
    band = mapped.trust
    dev = 0.0
    scale = sobolev_norm(u0, float(config["sigma"]), upper=band)
    for k in range(times.size):
        d = SpectralFunction(grid, mapped.values[k] - field.values[k])
        dev = max(dev, sobolev_norm(d, float(config["sigma"]), upper=band))
    prof = wavesolver.residual_profile(field, p, kappa, sigma=float(config["sigma"]))
    lines = ["t,residual"]
    for t, r in zip(times[1:-1], prof):
        lines.append(f"{repr(float(t))},{repr(float(r))}")
    path = artifacts.add("residual.csv", "\n".join(lines) + "\n")
    return [
        f"stationary-check p={p} lambda={lam} kappa={kappa}: "
        f"fixed_point_rel_dev={dev/scale:.3e} max_residual={prof.max():.3e}"
    ], [(None, path)]


def _run_boost(config, artifacts):
    grid = _grid_from(config["grid"])
    boost = _boost_from(float(config["c"]), config["sign"])
    base = PseudofunctionSpec(PseudofunctionKind.XPLUSI0, float(config["lambda"]))
    sol = geometry.BoostedSolution(base, boost)
    data = geometry.boosted_cauchy_data(sol, grid)
    paths = [
        ("spectrum", artifacts.add_file_writer(
            "boost_u0.csv", lambda p: write_spectrum_csv(data.u0, p))),
        ("spectrum", artifacts.add_file_writer(
            "boost_u1.csv", lambda p: write_spectrum_csv(data.u1, p))),
    ]
    return [
        f"boost c={boost.c} regime={boost.regime.value} theta={boost.theta:.6f} "
        f"cosh={boost.cosh:.6f} sinh={boost.sinh:.6f} "
        f"nonlinearity_sign_flip={sol.nonlinearity_sign_flip}"
    ], paths


def _run_singsupp(config, artifacts):
    grid = _grid_from(config["grid"])
    w = float(config["window"])
    eps = w / 100.0
    boost = _boost_from(float(config["c"]), config["sign"]) if config["c"] else None
    base = PseudofunctionSpec(PseudofunctionKind.XPLUSI0, float(config["lambda"]))
    t = float(config["t"])
    if boost is None:
        from .pseudofn import xplusi0_eval

        field = lambda x: xplusi0_eval(base.lam, np.asarray(x, dtype=float), eps)
    else:
        sol = geometry.BoostedSolution(base, boost)
        field = lambda x: geometry.boost_eval(sol, np.asarray(x, dtype=float)[:, None], t, eps)
    stride = config["stride"]
    estimates = diagnostics.exponent_profile(
        field,
        (float(config["range"][0]), float(config["range"][1])),
        w,
        grid,
        stride=None if stride is None else float(stride),
        eps=eps,
    )
    hits = diagnostics.singular_set(
        field,
        (float(config["range"][0]), float(config["range"][1])),
        w,
        grid,
        float(config["threshold"]),
        stride=None if stride is None else float(stride),
        eps=eps,
    )
    path = artifacts.add_file_writer(
        "singsupp.csv", lambda p: diagnostics.write_exponent_csv(estimates, p)
    )
    return [f"singsupp found {len(hits)} singular point(s): {[round(h, 6) for h in hits]}"], [
        ("exponent-profile", path)
    ]


def _run_ray_track(config, artifacts):
    grid = _grid_from(config["grid"])
    w = float(config["window"])
    boost = _boost_from(float(config["c"]), config["sign"])
    base = PseudofunctionSpec(PseudofunctionKind.XPLUSI0, float(config["lambda"]))
    sol = geometry.BoostedSolution(base, boost)
    times = [float(t) for t in config["times"]]
    hw = config["search_halfwidth"]
    hw = None if hw is None else float(hw)
    positions = diagnostics.ray_positions(
        sol, times, w, grid, float(config["threshold"]), hw
    )
    ray = diagnostics.track_ray(sol, times, w, grid, float(config["threshold"]), hw)
    path = artifacts.add_file_writer(
        "ray.csv", lambda p: diagnostics.write_ray_csv(times, positions, ray, p)
    )
    return [
        f"ray-track c_est={ray.c_est:.6f} class={ray.classification.value} "
        f"residual={ray.residual:.3e}"
    ], [("ray", path)]


def _run_radial_nd(config, artifacts):
    p, n = int(config["p"]), int(config["n"])
    params = radial.stationary_params_nd(p, n)
    if not params.feasible:
        raise ValidationError(params.summary())
    spec = radial.RadialSpec(float(params.lam), n)
    h = float(config["h"])
    rng = np.random.default_rng(int(config["seed"]))
    radii = rng.uniform(float(config["r_min"]), float(config["r_max"]), int(config["num_radii"]))
    lam, kappa = float(params.lam), float(params.kappa)
    lines = ["r,fd_value,exact_value,rel_err"]
    worst = 0.0
    for r in radii:
        r = float(r)
        up, u0, um = (r + h) ** lam, r**lam, (r - h) ** lam
        fd = (up - 2 * u0 + um) / (h * h) + (n - 1) / r * (up - um) / (2 * h)
        # stationary wave equation: Lap(u) = -kappa u^p
        exact = -kappa * r ** (lam * p)
        rel = abs(fd - exact) / abs(exact)
        worst = max(worst, rel)
        lines.append(f"{repr(r)},{repr(fd)},{repr(exact)},{repr(rel)}")
    path = artifacts.add("radial.csv", "\n".join(lines) + "\n")
    return [params.summary(), f"radial-nd max pointwise rel_err={worst:.3e}"], [(None, path)]


_SUBCOMMANDS = {
    "pseudofn": (
        _run_pseudofn,
        {
            "lambda": -2.0,
            "grid": {"cutoff": 256.0, "bins": 65536},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "product": (
        _run_product,
        {
            "lambda_f": -1.0,
            "lambda_g": -1.0,
            "grid": {"cutoff": 256.0, "bins": 65536},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "norm-probe": (
        _run_norm_probe,
        {
            "f": {"kind": "pseudofn", "lambda": -1.0, "width": 1.0, "rate": 1.0},
            "g": {"kind": "pseudofn", "lambda": -1.0, "width": 1.0, "rate": 1.0},
            "s1": -0.6,
            "s2": -0.6,
            "sigma": -1.8,
            "grid": {"cutoff": 64.0, "bins": 1024},
            "refinements": 4,
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "bounds": (
        _run_bounds,
        {"p_values": [2, 3, 4, 5], "output": {"directory": ".", "formats": ["csv"]}},
    ),
    "solve": (
        _run_solve,
        {
            "p": 2,
            "kappa": 1.0,
            "T": 0.1,
            "nt": 32,
            "tol": 1e-8,
            "max_iter": 25,
            "norm_s": 0.0,
            "sigma": -2.0,
            "data": {"preset": "exp", "rate": 1.0, "kind": "exp", "lambda": -2.0, "width": 1.0},
            "grid": {"cutoff": 32.0, "bins": 1024},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "stationary-check": (
        _run_stationary_check,
        {
            "p": 2,
            "T": 0.5,
            "nt": 64,
            "sigma": -2.0,
            "grid": {"cutoff": 256.0, "bins": 65536},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "boost": (
        _run_boost,
        {
            "lambda": -2.0,
            "c": 0.5,
            "sign": "plus",
            "grid": {"cutoff": 256.0, "bins": 65536},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "singsupp": (
        _run_singsupp,
        {
            "lambda": -2.0,
            "c": 0.0,
            "t": 0.0,
            "sign": "plus",
            "window": 0.05,
            "stride": None,
            "threshold": 0.0,
            "range": [-2.0, 2.0],
            "grid": {"cutoff": 512.0, "bins": 131072},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "ray-track": (
        _run_ray_track,
        {
            "lambda": -2.0,
            "c": 0.5,
            "sign": "plus",
            "times": [-0.5, 0.0, 0.5],
            "window": 0.05,
            "threshold": 0.0,
            "search_halfwidth": None,
            "grid": {"cutoff": 512.0, "bins": 131072},
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
    "radial-nd": (
        _run_radial_nd,
        {
            "p": 4,
            "n": 3,
            "num_radii": 100,
            "r_min": 0.1,
            "r_max": 10.0,
            "h": 1e-3,
            "seed": 20240901,
            "output": {"directory": ".", "formats": ["csv"]},
        },
    ),
}


def _validate_threads_env() -> None:
    raw = os.environ.get("CONEWAVE_THREADS")
    if raw is None:
        return
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"CONEWAVE_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ValidationError(f"CONEWAVE_THREADS must be a positive integer, got {raw!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="conewave",
        description="half-line spectral experiments: products, bounds, wave solves, diagnostics",
        allow_abbrev=False,
    )
    parser.add_argument("subcommand", choices=sorted(_SUBCOMMANDS))
    parser.add_argument("--config", help="JSON config file", default=None)
    args, rest = parser.parse_known_args(argv)

    runner, defaults = _SUBCOMMANDS[args.subcommand]
    args.overrides = rest
    try:
        _validate_threads_env()
        config = _load_config(defaults, args)
        outdir = str(config["output"]["directory"])
        formats = list(config["output"]["formats"])
        for fmt in formats:
            if fmt not in ("csv", "svg"):
                raise ValidationError(f"unknown output format {fmt!r}")
        artifacts = _Artifacts(outdir)
        summaries, plotspec = runner(config, artifacts)
    except (ValidationError, InvalidArgumentError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numerical failure in wave-solver: {exc}", file=sys.stderr)
        return 3
    except PartialTrackError as exc:
        print(f"numerical failure in diagnostics: {exc}", file=sys.stderr)
        return 3
    except ConewaveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    written = artifacts.flush()
    for path, rows in written:
        print(f"wrote {path} ({rows} lines)")
    if "svg" in formats:
        chash = _config_hash(config)
        for kind, csv_path in plotspec:
            if kind is None:
                continue
            svg_path = os.path.splitext(csv_path)[0] + ".svg"
            plots.plot_emit(csv_path, kind, svg_path, chash)
            print(f"wrote {svg_path} (svg)")
    for line in summaries:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
