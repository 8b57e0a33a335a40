"""Command-line front end.

    gestark shift --config run.json
    gestark sweep --config run.json --out sweep.csv
    gestark simulate --config run.json --out data.csv [--seed N]
    gestark fit --data data.csv [--config run.json]
    gestark tunability --config run.json [--format json]
    gestark gtensor --config run.json

Exit codes: 0 success, 2 configuration error, 3 numeric error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .addressability import tunability
from .config import RunConfig, load_config
from .errors import ConfigError, EmptySweep, StarkError
from .experiment import EchoPhaseDataset, generate_dataset, sidecar_path
from .fitting import global_fit
from .geometry import to_unit_vector
from .gtensor import (
    EQUAL_WEIGHTS,
    RepopulationModel,
    ValleyGTensor,
    effective_g_tensor,
    g_along,
    g_along_gradient,
    repopulation_weights,
    weights_from_sequence,
)
from .stark import AVERAGED, StarkRegistry, donor as make_donor, stark_shift

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


@contextlib.contextmanager
def _building():
    """Treat any bad value met while assembling inputs as a config error."""
    try:
        yield
    except ConfigError:
        raise
    except (ValueError, LookupError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _fmt_m(m) -> str:
    return "avg" if m is None else str(m)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rows_to_table(header, rows) -> str:
    cells = [list(header)] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _render(header, rows, fmt: str, extra: dict | None = None) -> str:
    if fmt == "csv":
        return _rows_to_csv(header, rows)
    if fmt == "json":
        doc = dict(extra or {})
        doc["rows"] = [dict(zip(header, r)) for r in rows]
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return _rows_to_table(header, rows)


def _lines_for(cfg: RunConfig, params, donor) -> list:
    """Hyperfine lines that can be evaluated, always ending with the average."""
    if params.eta_A is not None and donor.hyperfine_A is not None:
        return donor.projections() + [AVERAGED]
    return [AVERAGED]


# -- commands ---------------------------------------------------------------

def cmd_shift(cfg: RunConfig, args) -> int:
    with _building():
        d = cfg.donor()
        p = cfg.stark()
        f0 = cfg.f0()
        e = cfg.e_magnitude()
        cfg.field()
    rows = [(_fmt_m(m), repr(float(stark_shift(p, d, f0, m, e)))) for m in _lines_for(cfg, p, d)]
    header = ("m_i", "delta_f_hz")
    extra = {"donor": d.name, "e_field_v_per_cm": e, "f0_hz": f0, "eta_g_um2_per_v2": p.eta_g,
             "eta_a_um2_per_v2": p.eta_A}
    _emit(_render(header, rows, args.format or "table", extra), args.out)
    return EXIT_OK


def _rotate(v, axis, angle_rad):
    k = to_unit_vector(axis)
    return v * math.cos(angle_rad) + np.cross(k, v) * math.sin(angle_rad) + k * np.dot(k, v) * (1 - math.cos(angle_rad))


def _valley_g(cfg: RunConfig, d) -> ValleyGTensor:
    g = cfg.raw.get("gtensor", {})
    return ValleyGTensor(g.get("g_perp", d.valley_g.g_perp), g.get("g_par", d.valley_g.g_par))


def cmd_sweep(cfg: RunConfig, args) -> int:
    with _building():
        d = cfg.donor()
        f0 = cfg.f0()
        sweep = cfg.sweep()
        if not sweep:
            raise EmptySweep("field.sweep is empty")
        rotation = cfg.raw["field"].get("b_rotation")
        if rotation is None:
            p = cfg.stark()
        else:
            if "kappa" not in cfg.raw.get("gtensor", {}):
                raise ConfigError("an orientation sweep (field.b_rotation) needs gtensor.kappa")
            vg = _valley_g(cfg, d)
            model = RepopulationModel(cfg.raw["gtensor"]["kappa"])
            fc = cfg.field()
    if rotation is None:
        header = ("e_field_v_per_cm", "m_i", "delta_f_hz")
        rows = [(repr(e), _fmt_m(m), repr(float(stark_shift(p, d, f0, m, e))))
                for e in sweep for m in _lines_for(cfg, p, d)]
    else:
        # phenomenological valley repopulation: df/f0 = g(E)/g(0) - 1 along each B
        header = ("angle_deg", "e_field_v_per_cm", "delta_f_hz")
        e_hat = to_unit_vector(fc.e_direction)
        b_ref = to_unit_vector(fc.b_direction)
        g_zero = effective_g_tensor(vg)
        rows = []
        for ang in rotation["angles_deg"]:
            b = _rotate(b_ref, rotation["axis"], math.radians(ang))
            g0 = g_along(g_zero, b)
            for e in sweep:
                w = repopulation_weights(model, e_hat, abs(e) / 1e4)
                df = f0 * (g_along(effective_g_tensor(vg, w=w), b) / g0 - 1.0)
                rows.append((repr(float(ang)), repr(e), repr(float(df))))
    _emit(_render(header, rows, args.format or "csv"), args.out)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    if args.out is None:
        raise ConfigError("simulate needs --out PATH for the dataset CSV")
    with _building():
        d = cfg.donor()
        p = cfg.stark()
        fc = cfg.field()
        sweep = cfg.sweep()
        seq = cfg.sequence()
        noise = cfg.noise(args.seed)
        strain = cfg.strain()
        if p.eta_A is not None and d.hyperfine_A is None:
            raise ConfigError("donor.hyperfine_A is required to simulate resolved hyperfine lines")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        data = generate_dataset(d, p, sweep, fc, seq, noise, strain)
    _atomic_write(args.out, data.to_csv())
    _atomic_write(sidecar_path(args.out), json.dumps(data.metadata, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_fit(cfg: RunConfig | None, args) -> int:
    if args.data is None:
        raise ConfigError("fit needs --data PATH")
    data = EchoPhaseDataset.load(args.data)
    meta = data.metadata
    with _building():
        if cfg is not None and "donor" in cfg.raw:
            d = cfg.donor()
        elif "donor" in meta:
            d = make_donor(meta["donor"], hyperfine_A=meta.get("hyperfine_A"))
        else:
            raise ConfigError("donor unknown: give a config with a donor block or a dataset sidecar")
        if cfg is not None and "field" in cfg.raw:
            f0 = cfg.f0()
        elif "f0" in meta:
            f0 = float(meta["f0"])
        else:
            raise ConfigError("f0 unknown: give field.f0 in the config or a dataset sidecar")
        resolved = len(np.unique(data.m_i[~data.averaged]))
        defaults = {"fit_hyperfine": resolved >= 2 and d.hyperfine_A is not None}
        if meta.get("polarity") == "unipolar":
            defaults.update(mode="unipolar_with_linear", intercept=True)
        opts = cfg.fit_options(**defaults) if cfg is not None else RunConfig({}, None).fit_options(**defaults)
        if opts.fit_hyperfine and d.hyperfine_A is None:
            raise ConfigError("fit_hyperfine needs donor.hyperfine_A")
    result = global_fit(data, d, f0, opts)
    _emit(result.dumps(), args.out)
    return EXIT_OK


def cmd_tunability(cfg: RunConfig, args) -> int:
    with _building():
        d = cfg.donor()
        p = cfg.stark()
        f0 = cfg.f0()
        t = cfg.raw.get("tunability", {})
        label = cfg.orientation_label()
    kwargs = {k: t[k] for k in ("e_max", "linewidth") if k in t}
    report = tunability(p, d, f0, orientation=label, **kwargs)
    fmt = args.format or "table"
    _emit(report.dumps() if fmt == "json" else report.table(), args.out)
    return EXIT_OK


def cmd_gtensor(cfg: RunConfig, args) -> int:
    with _building():
        d = cfg.donor()
        vg = _valley_g(cfg, d)
        g = cfg.raw.get("gtensor", {})
        f = cfg.raw.get("field", {})
        b_dir = f.get("b_direction", [0, 0, 1])
        if "weights" in g:
            w = weights_from_sequence(g["weights"])
        elif "kappa" in g:
            if "e_direction" not in f:
                raise ConfigError("gtensor.kappa needs field.e_direction")
            w = repopulation_weights(RepopulationModel(g["kappa"]), to_unit_vector(f["e_direction"]),
                                     f.get("e_magnitude", 0.0) / 1e4)
        else:
            w = EQUAL_WEIGHTS.copy()
    t = effective_g_tensor(vg, w=w)
    gb = g_along(t, b_dir)
    grad = g_along_gradient(vg, EQUAL_WEIGHTS, b_dir)
    # derivative along weight redistributions (sum of changes = 0) at equal weights
    redistribution = grad - grad.mean()
    doc = {
        "valley_g_perp": vg.g_perp,
        "valley_g_par": vg.g_par,
        "weights": [float(x) for x in w],
        "g_eff": [[float(x) for x in row] for row in t],
        "b_direction": list(b_dir),
        "g_along_b": gb,
        "redistribution_sensitivity": float(np.linalg.norm(redistribution)),
    }
    if (args.format or "table") == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"valley g: g_perp={vg.g_perp:g} g_par={vg.g_par:g}",
                 "weights: " + " ".join(f"{x:.6g}" for x in w),
                 "g_eff (dimensionless):"]
        lines += ["  " + " ".join(f"{x:+.6f}" for x in row) for row in t]
        lines.append(f"g along B{list(b_dir)}: {gb:.6f}")
        lines.append(f"|d g_along / d(redistribution)| at equal weights: {doc['redistribution_sensitivity']:.3e}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "shift": cmd_shift,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "tunability": cmd_tunability,
    "gtensor": cmd_gtensor,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gestark", description="Stark shifts of donor spins in germanium")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "fit")
        p.add_argument("--out", type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--registry", type=Path, help="Stark parameter table (default: bundled)")
        p.add_argument("--format", choices=("csv", "json", "table"))
        if name == "fit":
            p.add_argument("--data", type=Path, help="dataset CSV (metadata read from the .json sidecar)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        registry = StarkRegistry.load(args.registry)
        raw = load_config(args.config) if args.config is not None else None
        cfg = RunConfig(raw, registry) if raw is not None else None
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (StarkError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # malformed dataset or registry file
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
