"""Command line front end.

Every subcommand reads an optional INI config (``--config``) with the
sections

    [surface]       genus
    [cover NAME]    see currents.parse_currents
    [current NAME]  see currents.parse_currents
    [task]          task parameters (per subcommand, listed in --help)
    [run]           seed, margin

Unknown sections or keys are rejected (exit status 3).  Without ``--out``
the main artifact is printed; with ``--out DIR`` all artifacts and a JSON
manifest are written there, and only after the computation succeeded.

Exit status: 0 pass, 1 fail, 2 inconclusive, 3 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BudgetExceeded,
    ConfigError,
    DegenerateCurve,
    DegenerateSpectrum,
    GeoCurrentsError,
    InsufficientPairs,
    NoPositiveEps,
    NoWitnessInBudget,
    UnstableEnumeration,
    WindowTooSmall,
)

SCHEMA = "geocurrents.manifest/1"
EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3

# task -> {key: (type, default, help)}
TASKS: dict = {
    "box-mass": {
        "current": (str, "L", "name of the current"),
        "boxes": (int, 20, "number of seeded random boxes"),
        "box": (str, "", "explicit boxes as 'a b c d' angle quadruples separated by ';'"),
    },
    "certify-sh": {
        "current": (str, "L", "name of the current"),
        "epsilon": (float, 1.0, "epsilon of the crossing-pair test (ignored if A0 is set)"),
        "A0": (float, 0.0, "(A0, B0, C0) test when positive"),
        "B0": (float, 4.0, ""),
        "C0": (float, 0.5, ""),
        "pairs": (int, 500, "number of sampled crossing pairs"),
        "pair_len": (int, 4, "maximal word length of a and b"),
        "estimate": (bool, True, "also bisect for the largest passing epsilon"),
    },
    "certify-ptolemy": {
        "current": (str, "L", "name of the current"),
        "pairs": (int, 200, "number of sampled crossing pairs"),
        "pair_len": (int, 3, "maximal word length of a and b"),
        "n_max": (int, 5, "largest power n"),
    },
    "witness": {
        "gamma": (str, "a1 b1 A1 b1", "self-crossing class"),
        "max_len": (int, 10, "bound on |a| + |b|"),
        "n": (int, 3, "largest power n"),
        "max_pairs": (int, 20000, "cap on examined crossing pairs"),
        "require_pattern": (bool, True, "insist on the (k+1, k+1, 2k, 2) pattern"),
    },
    "flat-strip": {
        "epsilon": (float, 0.5, ""),
        "x": (float, 1.0, ""),
        "y_max": (float, 100.0, ""),
    },
    "bolicity": {
        "current": (str, "F", "name of an atomic current with a crossing atom"),
        "depth": (int, 5, "number of translate layers"),
    },
    "spectrum": {
        "currents": (str, "L", "comma separated current names"),
        "max_len": (int, 6, "maximal word length"),
        "cache": (bool, False, "reuse tables from the on-disk cache"),
    },
    "correlate": {
        "currents": (str, "L, L2", "two comma separated current names"),
        "max_len": (int, 8, "maximal word length"),
        "eps": (float, 1.0, "window width"),
        "points": (int, 30, "number of x values"),
        "cache": (bool, False, "reuse tables from the on-disk cache"),
    },
    "manhattan": {
        "currents": (str, "L, L2", "two comma separated current names"),
        "max_len": (int, 8, "maximal word length"),
        "a_points": (int, 21, "number of a values in [0, h1]"),
        "cache": (bool, False, "reuse tables from the on-disk cache"),
    },
    "modulus": {
        "t": (float, math.log(2), "Liouville mass of the box"),
        "M": (float, 1.0, "quasisymmetry constant"),
    },
    "transfer": {
        "current": (str, "P", "name of a transfer current"),
        "probes": (str, "a1, b1, a1 b1, a2, a1 b1 A1 b1", "comma separated probe words"),
    },
    "integrality": {
        "current": (str, "D", "name of the current"),
        "probes": (int, 50, "number of probe classes (shortest first)"),
        "tol": (float, 1e-6, "distance to the nearest integer"),
    },
}

RUN_KEYS = {"seed": (int, 0, "random seed"), "margin": (float, 0.5, "tile budget margin")}

CSV_COLUMNS = {
    "box-mass": "box_a, box_b, box_c, box_d, mass, opposite_mass",
    "certify-sh": "report.json (checked, verdict, min_margin, violations)",
    "certify-ptolemy": "report.json",
    "witness": "witness.json with integer intersection numbers",
    "flat-strip": "result.json",
    "bolicity": "n, nu_B_n, mu_G_perp_n",
    "spectrum": "class, word_len, length_0, ...",
    "correlate": "x, count, fitted",
    "manhattan": "a, b, residual",
    "modulus": "t, M, k, k_prime, eta, omega",
    "transfer": "probe, n_iX, iY, difference",
    "integrality": "probe, value, integral",
}

DEFAULT_CURRENTS = """
[current L]
type = liouville
rep = regular

[current L2]
type = liouville
rep = twisted

[current F]
type = atomic
atoms = a1 b1 A1 b1 : 1

[current D]
type = combination
terms = 1 * A, -1 * B

[current A]
type = atomic
atoms = a1 : 1

[current B]
type = atomic
atoms = b1 : 1

[cover Z2]
degree = 2
a1 = (1 2)
transversal = 1, a1

[current P]
type = transfer
cover = Z2
inner = b1 : 1
"""


@dataclass
class ExperimentConfig:
    task: str
    genus: int
    currents: dict
    params: dict
    seed: int
    margin: float
    source: str = ""
    defaults_used: list = field(default_factory=list)

    def resolved(self) -> dict:
        return {"task": self.task, "genus": self.genus, "seed": self.seed, "margin": self.margin,
                "params": self.params, "currents": {k: v.describe() for k, v in sorted(self.currents.items())},
                "defaults": sorted(self.defaults_used), "config_file": self.source}


def _coerce(kind, raw: str, key: str):
    try:
        if kind is bool:
            v = raw.strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def load_config(task: str, path: str | None, seed: int | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Parse and validate a config for task; unknown keys raise ConfigError."""
    from .currents import parse_currents

    if task not in TASKS:
        raise ConfigError(f"unknown task {task!r}")
    text = ""
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for sec in cp.sections():
        if sec in ("surface", "task", "run") or re.fullmatch(r"(current|cover)\s+\S+", sec):
            continue
        raise ConfigError(f"unknown section [{sec}]")
    if cp.has_section("surface"):
        extra = set(cp["surface"]) - {"genus"}
        if extra:
            raise ConfigError(f"unknown keys in [surface]: {sorted(extra)}")
    genus = _coerce(int, cp.get("surface", "genus", fallback="2"), "genus")
    spec = TASKS[task]
    params, used = {}, []
    given = dict(cp["task"]) if cp.has_section("task") else {}
    given.update(overrides or {})
    unknown = set(given) - set(spec)
    if unknown:
        raise ConfigError(f"unknown keys for task {task}: {sorted(unknown)}")
    for key, (kind, default, _) in spec.items():
        if key in given:
            params[key] = _coerce(kind, str(given[key]), key)
        else:
            params[key] = default
            used.append(key)
    run = dict(cp["run"]) if cp.has_section("run") else {}
    unknown = set(run) - set(RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys in [run]: {sorted(unknown)}")
    cfg_seed = _coerce(int, run["seed"], "seed") if "seed" in run else 0
    margin = _coerce(float, run["margin"], "margin") if "margin" in run else 0.5
    if seed is not None:
        cfg_seed = seed
    body = "\n".join(f"[{s}]\n" + "\n".join(f"{k} = {v}" for k, v in cp[s].items())
                     for s in cp.sections() if s.startswith(("current", "cover")))
    defaults = parse_currents(DEFAULT_CURRENTS) if genus == 2 else {}
    try:
        mine = parse_currents(f"[surface]\ngenus = {genus}\n" + body)
    except ConfigError:
        raise
    except (GeoCurrentsError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid current description: {exc}") from exc
    currents = dict(defaults)
    currents.update(mine)
    return ExperimentConfig(task, genus, currents, params, cfg_seed, margin, path or "", used)


# ---------------------------------------------------------------------------
# tasks; each returns (status, {artifact name: text}, summary dict)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return f"{x:.15g}" if isinstance(x, float) else str(x)


def _current(cfg: ExperimentConfig, key: str = "current"):
    name = cfg.params[key]
    if name not in cfg.currents:
        raise ConfigError(f"no current named {name!r}")
    return cfg.currents[name]


def _current_list(cfg: ExperimentConfig, want: int | None = None) -> list:
    names = [n.strip() for n in cfg.params["currents"].split(",") if n.strip()]
    if want is not None and len(names) != want:
        raise ConfigError(f"task {cfg.task} needs {want} currents")
    out = []
    for n in names:
        if n not in cfg.currents:
            raise ConfigError(f"no current named {n!r}")
        out.append(cfg.currents[n])
    return out


def _verdict_status(verdict: str) -> int:
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(verdict, EXIT_INCONCLUSIVE)


def task_box_mass(cfg):
    from .currents import Box, box_mass

    c = _current(cfg)
    p = cfg.params
    if p["box"].strip():
        boxes = []
        for chunk in p["box"].split(";"):
            vals = [float(v) for v in chunk.split()]
            if len(vals) != 4:
                raise ConfigError("each box needs four angles")
            boxes.append(Box.from_angles(*vals))
    else:
        rng = np.random.default_rng(cfg.seed)
        boxes = [Box.random(rng) for _ in range(p["boxes"])]
    rows = []
    for b in boxes:
        rows.append([_fmt(x) for x in b.angles] + [_fmt(box_mass(c, b, cfg.margin)),
                                                   _fmt(box_mass(c, b.opposite(), cfg.margin))])
    text = _csv(["box_a", "box_b", "box_c", "box_d", "mass", "opposite_mass"], rows)
    return EXIT_PASS, {"box_mass.csv": text}, {"boxes": len(rows)}


def _pairs(cfg, rep):
    from .certifiers import sample_crossing_pairs

    return sample_crossing_pairs(rep, cfg.params["pair_len"], cfg.params["pairs"], cfg.seed)


def task_certify_sh(cfg):
    from .certifiers import SHParams, check_sh_abc, check_sh_crossing, estimate_eps_star
    from .surface_group import fuchsian_rep

    c = _current(cfg)
    p = cfg.params
    pairs = _pairs(cfg, fuchsian_rep(cfg.genus))
    if p["A0"] > 0:
        rep = check_sh_abc(c, SHParams(A0=p["A0"], B0=p["B0"], C0=p["C0"]), pairs)
    else:
        rep = check_sh_crossing(c, SHParams(epsilon=p["epsilon"]), pairs)
    out = rep.to_dict()
    if p["estimate"] and p["A0"] <= 0:
        try:
            eps = estimate_eps_star(c, pairs)
            out["eps_star_sample_bound"] = None if math.isinf(eps) else eps
        except NoPositiveEps as exc:
            out["eps_star_sample_bound"] = None
            out["notes"].append(str(exc))
    return _verdict_status(rep.verdict), {"report.json": _json(out)}, {"verdict": rep.verdict}


def task_certify_ptolemy(cfg):
    from .certifiers import check_ptolemy
    from .surface_group import fuchsian_rep

    c = _current(cfg)
    rep = check_ptolemy(c, _pairs(cfg, fuchsian_rep(cfg.genus)), cfg.params["n_max"])
    return _verdict_status(rep.verdict), {"report.json": rep.to_json() + "\n"}, {"verdict": rep.verdict}


def task_witness(cfg):
    from .certifiers import WitnessBudget, ptolemy_witness_search
    from .surface_group import Word, fuchsian_rep

    p = cfg.params
    rep = fuchsian_rep(cfg.genus)
    gamma = Word.parse(p["gamma"], cfg.genus)
    w = ptolemy_witness_search(gamma, rep, WitnessBudget(p["max_len"], p["n"], p["max_pairs"]),
                               require_pattern=p["require_pattern"])
    return EXIT_PASS, {"witness.json": _json(w.to_dict())}, {"quantity": w.quantity}


def task_flat_strip(cfg):
    from .certifiers import flat_strip_defect, flat_strip_probe

    p = cfg.params
    y = flat_strip_probe(p["epsilon"], p["x"], p["y_max"])
    out = {"epsilon": p["epsilon"], "x": p["x"], "y_max": p["y_max"], "violating_y": y,
           "defect": None if y is None else flat_strip_defect(p["epsilon"], p["x"], y)}
    # a violation is the expected outcome: the probe found its witness
    status = EXIT_PASS if y is not None else EXIT_INCONCLUSIVE
    return status, {"result.json": _json(out)}, {"violating_y": y}


def task_bolicity(cfg):
    from .certifiers import bolicity_probe

    c = _current(cfg)
    pr = bolicity_probe(c, cfg.params["depth"], cfg.margin)
    rows = [[n, _fmt(a), _fmt(b)] for n, (a, b) in enumerate(pr.pairs, start=1)]
    meta = {"element": pr.element, "translation_length": pr.translation_length, "nu_box": pr.nu_box,
            "box": list(pr.box.angles), "evaluated_translates": pr.evaluated_translates, "notes": pr.notes}
    return EXIT_PASS, {"bolicity.csv": _csv(["n", "nu_B_n", "mu_G_perp_n"], rows),
                       "bolicity.json": _json(meta)}, {"pairs": len(rows)}


def _table(cfg, cs):
    from .counting import build_spectrum

    return build_spectrum(cs, cfg.params["max_len"], cfg.genus, cache=cfg.params["cache"])


def task_spectrum(cfg):
    cs = _current_list(cfg)
    t = _table(cfg, cs)
    return EXIT_PASS, {"spectrum.csv": t.to_csv()}, {"rows": len(t)}


def task_correlate(cfg):
    from .counting import correlation_sweep, manhattan_endpoints

    t = _table(cfg, _current_list(cfg, 2))
    ends = manhattan_endpoints(t, 0, 1)
    h1, h2 = ends["a_at_b0"], ends["b_at_a0"]
    fit = correlation_sweep(t, 0, 1, h1, h2, cfg.params["eps"], points=cfg.params["points"])
    meta = {"h1": h1, "h2": h2, "C": fit.C, "M": fit.M, "log_residual": fit.residual,
            "complete_below": fit.complete_below}
    return EXIT_PASS, {"correlation.csv": fit.to_csv(), "fit.json": _json(meta)}, {"M": fit.M}


def task_manhattan(cfg):
    from .counting import convexity_check, correlation_exponent, manhattan_estimate, manhattan_endpoints

    t = _table(cfg, _current_list(cfg, 2))
    ends = manhattan_endpoints(t, 0, 1)
    grid = np.linspace(0.0, ends["a_at_b0"], cfg.params["a_points"])
    ms = manhattan_estimate(t, 0, 1, grid, ends["a_at_b0"], ends["b_at_a0"])
    conv = convexity_check(ms)
    meta = {"h1": ms.h1, "h2": ms.h2, "window": list(ms.window), "convexity": conv.to_dict()}
    status = _verdict_status(conv.verdict)
    try:
        meta["exponent"] = correlation_exponent(ms)
    except DegenerateCurve as exc:
        meta["exponent"] = None
        meta["exponent_error"] = str(exc)
        status = max(status, EXIT_INCONCLUSIVE) if status != EXIT_FAIL else status
    return status, {"manhattan.csv": ms.to_csv(), "manhattan.json": _json(meta)}, {"verdict": conv.verdict}


def task_modulus(cfg):
    from .elliptic_modulus import modulus_report

    r = modulus_report(cfg.params["t"], cfg.params["M"])
    keys = ["t", "M", "k", "k_prime", "eta", "omega"]
    text = _csv(keys, [[_fmt(float(r[k])) for k in keys]])
    return EXIT_PASS, {"modulus.csv": text, "modulus.json": _json(r)}, r


def task_transfer(cfg):
    from .currents import TransferImage
    from .spectra import cover_intersection, stable_length
    from .surface_group import Word

    c = _current(cfg)
    if not isinstance(c, TransferImage):
        raise ConfigError("transfer task needs a current of type transfer")
    n = c.cover.degree
    rows, worst = [], 0.0
    for w in (x.strip() for x in cfg.params["probes"].split(",")):
        if not w:
            continue
        probe = Word.parse(w, cfg.genus)
        lhs = n * stable_length(c, probe)
        rhs = cover_intersection(c.cover, c.inner, probe) / n
        worst = max(worst, abs(lhs - rhs))
        rows.append([w, _fmt(float(lhs)), _fmt(float(rhs)), _fmt(float(lhs - rhs))])
    status = EXIT_PASS if worst <= 1e-8 else EXIT_FAIL
    return status, {"transfer.csv": _csv(["probe", "n_iX", "iY", "difference"], rows)}, {"max_difference": worst}


def task_integrality(cfg):
    from .currents import integrality_screen
    from .surface_group import enumerate_classes

    c = _current(cfg)
    k = cfg.params["probes"]
    probes = []
    L = 1
    while len(probes) < k and L <= 8:
        probes = enumerate_classes(L, cfg.genus)
        L += 1
    probes = probes[:k]
    rep = integrality_screen(c, probes, cfg.params["tol"])
    rows = [[str(p), _fmt(float(v)), int(ok)] for p, v, ok in zip(probes, rep.values, rep.integral)]
    status = EXIT_PASS if rep.passed else EXIT_FAIL
    return status, {"integrality.csv": _csv(["probe", "value", "integral"], rows)}, {"verdict": rep.verdict}


RUNNERS = {
    "box-mass": task_box_mass, "certify-sh": task_certify_sh, "certify-ptolemy": task_certify_ptolemy,
    "witness": task_witness, "flat-strip": task_flat_strip, "bolicity": task_bolicity,
    "spectrum": task_spectrum, "correlate": task_correlate, "manhattan": task_manhattan,
    "modulus": task_modulus, "transfer": task_transfer, "integrality": task_integrality,
}


def _json(obj) -> str:
    def default(o):
        if isinstance(o, (np.integer,)):
            return int(o)
        if isinstance(o, (np.floating,)):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        return str(o)

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def run(cfg: ExperimentConfig, out_dir: str | None = None, stream=None) -> int:
    """Execute one experiment; artifacts are written only on completion."""
    stream = stream or sys.stdout
    status: int
    notes: list = []
    try:
        status, artifacts, summary = RUNNERS[cfg.task](cfg)
    except ConfigError:
        raise
    except ValueError as exc:
        # out-of-domain task parameters (DomainError is a ValueError too)
        raise ConfigError(str(exc)) from exc
    except (UnstableEnumeration, NoWitnessInBudget, InsufficientPairs, NoPositiveEps, WindowTooSmall,
            DegenerateCurve, DegenerateSpectrum, BudgetExceeded) as exc:
        status, artifacts, summary = EXIT_INCONCLUSIVE, {}, {"error": type(exc).__name__}
        notes.append(f"{type(exc).__name__}: {exc}")
    except GeoCurrentsError as exc:
        status, artifacts, summary = EXIT_FAIL, {}, {"error": type(exc).__name__}
        notes.append(f"{type(exc).__name__}: {exc}")
    if out_dir is None:
        for name in sorted(artifacts):
            if len(artifacts) > 1:
                stream.write(f"# {name}\n")
            stream.write(artifacts[name])
        for n in notes:
            stream.write(f"# {n}\n")
        return status
    manifest = {
        "schema": SCHEMA,
        "version": __version__,
        "status": status,
        "config": cfg.resolved(),
        "artifacts": sorted(artifacts),
        "summary": summary,
        "notes": notes,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(artifacts.items()) + [("manifest.json", _json(manifest))]:
        tmp = out / (name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, out / name)
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geocurrents", description=__doc__.split("\n\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="task", required=True)
    for task, spec in TASKS.items():
        lines = [f"  {k} (default {d!r}) {h}".rstrip() for k, (_, d, h) in spec.items()]
        epilog = "[task] keys:\n" + "\n".join(lines) + f"\n\noutput: {CSV_COLUMNS[task]}"
        sp = sub.add_parser(task, epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.add_argument("--config", help="INI experiment description")
        sp.add_argument("--out", help="directory for artifacts and manifest")
        sp.add_argument("--seed", type=int, help="overrides [run] seed")
        if task == "modulus":
            sp.add_argument("--t", type=float, dest="t_value", help="Liouville mass of the box")
            sp.add_argument("--M", type=float, dest="M_value", help="quasisymmetry constant")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    overrides = {}
    if args.task == "modulus":
        if args.t_value is not None:
            overrides["t"] = args.t_value
        if args.M_value is not None:
            overrides["M"] = args.M_value
    try:
        cfg = load_config(args.task, args.config, args.seed, overrides)
        return run(cfg, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
