"""Command-line entry point: ``hadwiger <command> --config RUN.json``.

Exit codes: 0 success, 2 validation error, 3 enumeration cap exceeded.
Every output file carries the sha256 of the effective run config and the
sign-convention tag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import exact, phase, uniqueness
from .errors import HadwigerError, TooLargeError
from .fileio import (
    FORMAT_VERSION,
    ConfigFileError,
    config_hash,
    csv_text,
    dumps_configuration,
    read_configuration,
    write_json,
)
from .hexlattice import ball_faces, hexagon_faces, make_domain, make_torus
from .model import (
    CONVENTION,
    GeometricParams,
    RegionLabel,
    VertexEnergies,
    as_vertex_energies,
    classify,
    ground_references,
    preset,
)
from .render import configuration_svg, diagram_svg
from .sampler import ChainSettings, batch_means, domination_test, run_chain

EXIT_OK, EXIT_VALIDATION, EXIT_CAP = 0, 2, 3

_number = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}]}
_lattice = {
    "type": "object",
    "properties": {"width": {"type": "integer"}, "height": {"type": "integer"}},
    "required": ["width", "height"],
    "additionalProperties": False,
}
_domain = {
    "type": "object",
    "properties": {
        "center": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "radius": {"type": "integer", "minimum": 0},
        "boundary": {"enum": ["empty", "full"]},
    },
    "required": ["center", "radius", "boundary"],
    "additionalProperties": False,
}
_model = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"preset": {"type": "string"}, "h": _number},
            "required": ["preset"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "vertex_energies": {
                    "type": "object",
                    "properties": {"e_C": _number, "e_H": _number, "e_F": _number},
                    "required": ["e_C", "e_H", "e_F"],
                    "additionalProperties": False,
                }
            },
            "required": ["vertex_energies"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "geometric": {
                    "type": "object",
                    "properties": {"x": _number, "p": _number, "a": _number},
                    "required": ["x", "p", "a"],
                    "additionalProperties": False,
                }
            },
            "required": ["geometric"],
            "additionalProperties": False,
        },
    ]
}
_chain = {
    "type": "object",
    "properties": {
        "sweeps": {"type": "integer"},
        "burn_in": {"type": "integer"},
        "thinning": {"type": "integer"},
        "dynamics": {"enum": ["metropolis", "glauber"]},
        "initial": {"type": "string"},
        "ladder": {"type": "array", "items": {"type": "number"}},
    },
    "additionalProperties": False,
}
_positive = {"type": "number", "exclusiveMinimum": 0}
_nonneg_list = {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1}
_pos_list = {"type": "array", "items": _positive, "minItems": 1}

_COMMON = {"version": {"const": FORMAT_VERSION}, "command": {"type": "string"}, "seed": {"type": "integer", "minimum": 0}}

SCHEMAS = {
    "enumerate": {
        "lattice": _lattice,
        "domain": _domain,
        "model": _model,
        "T": _positive,
        "cap": {"type": "integer", "minimum": 1},
        "marginals": {"type": "boolean"},
    },
    "sample": {
        "lattice": _lattice,
        "domain": _domain,
        "model": _model,
        "T": _positive,
        "chain": _chain,
        "threshold": {"type": "number", "minimum": 0, "maximum": 1},
    },
    "phase-scan": {
        "resolution": {"type": "integer"},
        "beta": _positive,
        "method": {"enum": ["slawny", "exact", "mcmc"]},
        "band": {"type": "number", "minimum": 0},
        "chain": _chain,
    },
    "uniqueness": {
        "model": _model,
        "temperatures": _pos_list,
        "betas": _nonneg_list,
        "lattice": _lattice,
        "convergence_betas": _nonneg_list,
        "convergence_radius": {"type": "integer", "minimum": 0, "maximum": 1},
        "independence_T": _positive,
    },
    "render": {
        "input": {"type": "string"},
        "lattice": _lattice,
        "ground": {"type": "string"},
        "overlay": {"type": "boolean"},
        "size": _positive,
    },
}
REQUIRED = {
    "enumerate": ["lattice", "model", "T"],
    "sample": ["lattice", "model", "T"],
    "phase-scan": ["resolution"],
    "uniqueness": ["model"],
    "render": [],
}


class ValidationError(HadwigerError):
    pass


def schema_for(command: str) -> dict:
    return {
        "type": "object",
        "properties": {**_COMMON, **SCHEMAS[command]},
        "required": ["version", *REQUIRED[command]],
        "additionalProperties": False,
    }


def validate_config(command: str, cfg: dict) -> None:
    if not isinstance(cfg, dict):
        raise ValidationError("run config must be a JSON object")
    if cfg.get("command", command) != command:
        raise ValidationError(f"config is for command {cfg['command']!r}, not {command!r}")
    try:
        jsonschema.validate(cfg, schema_for(command))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"invalid run config at {where}: {exc.message}") from None


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None


def _value(v):
    return Fraction(v) if isinstance(v, str) else v


def model_from(cfg: dict) -> VertexEnergies:
    m = cfg["model"]
    if "preset" in m:
        return as_vertex_energies(preset(m["preset"], _value(m.get("h"))))
    if "vertex_energies" in m:
        ve = m["vertex_energies"]
        return VertexEnergies(_value(ve["e_C"]), _value(ve["e_H"]), _value(ve["e_F"]))
    g = m["geometric"]
    return as_vertex_energies(GeometricParams(_value(g["x"]), _value(g["p"]), _value(g["a"])))


def region_from(cfg: dict):
    lat = cfg["lattice"]
    host = make_torus(lat["width"], lat["height"])
    if "domain" not in cfg:
        return host
    d = cfg["domain"]
    center = host.face_id(*d["center"])
    interior = hexagon_faces(host, center, d["radius"])
    fill = 1 if d["boundary"] == "full" else 0
    return make_domain(host, interior, np.full(host.n_faces, fill, dtype=np.uint8))


class Outputs:
    """Writes files into the output directory, stamping provenance."""

    def __init__(self, out_dir: Path, cfg: dict):
        self.dir = out_dir
        self.hash = config_hash(cfg)
        self.written: list[Path] = []

    def _path(self, name: str) -> Path:
        p = self.dir / name
        self.written.append(p)
        return p

    def json(self, name: str, data: dict) -> None:
        write_json(self._path(name), {"config_hash": self.hash, "convention": CONVENTION, **data})

    def csv(self, name: str, rows, columns=None) -> None:
        header = f"# config_hash={self.hash} convention={CONVENTION}\n"
        self._path(name).write_text(header + csv_text(rows, columns))

    def svg(self, name: str, svg: str) -> None:
        stamp = f"<!-- config_hash={self.hash} convention={CONVENTION} -->\n"
        head, _, rest = svg.partition("\n")
        self._path(name).write_text(head + "\n" + stamp + rest)

    def text(self, name: str, text: str) -> None:
        self._path(name).write_text(text)


def cmd_enumerate(cfg: dict, out: Outputs) -> None:
    region = region_from(cfg)
    e = model_from(cfg)
    cap = cfg.get("cap", exact.DEFAULT_CAP)
    summary = exact.enumerate_summary(region, e, cfg["T"], cap=cap, marginals=cfg.get("marginals", True))
    data = summary.to_json()
    data["model"] = e.to_json()
    data["region_label"] = classify(e).name
    out.json("summary.json", data)
    if summary.marginals is not None:
        rows = []
        for f, p in zip(summary.faces, summary.marginals):
            i, j = region.host.coords(int(f))
            rows.append({"face": int(f), "i": i, "j": j, "p_filled": float(p)})
        out.csv("marginals.csv", rows, ["face", "i", "j", "p_filled"])


def _settings_from(cfg: dict, seed: int) -> ChainSettings:
    ch = dict(cfg.get("chain", {}))
    if "ladder" in ch:
        ch["ladder"] = tuple(ch["ladder"])
    return ChainSettings(seed=seed, **ch)


def cmd_sample(cfg: dict, out: Outputs) -> None:
    region = region_from(cfg)
    e = model_from(cfg)
    settings = _settings_from(cfg, cfg.get("seed", 0))
    print(f"sampling {settings.sweeps} sweeps at T={cfg['T']}", file=sys.stderr)
    res = run_chain(region, e, cfg["T"], settings)
    print(f"done, acceptance {res.acceptance_rate:.4f}", file=sys.stderr)
    verdict = domination_test(res, threshold=cfg.get("threshold", 0.9))
    cols = res.columns()
    n = len(res.fills)
    out.csv("series.csv", ({k: cols[k][i] for k in cols} for i in range(n)), list(cols))
    n_batches = min(20, n)
    e_mean, e_se = batch_means(res.energy_density, n_batches)
    d_mean, d_se = batch_means(res.filled_density, n_batches)
    out.json(
        "series.json",
        {
            "settings": settings.to_json(),
            "model": e.to_json(),
            "T": cfg["T"],
            "acceptance_rate": res.acceptance_rate,
            "swap_rate": res.swap_rate,
            "energy_density": {"mean": e_mean, "stderr": e_se},
            "filled_density": {"mean": d_mean, "stderr": d_se},
            "verdict": verdict.to_json(),
            "references": [{"id": r.ident, "class": r.cls} for r in res.refs],
        },
    )
    out.text("final.hexcfg", dumps_configuration(res.final))


def cmd_phase_scan(cfg: dict, out: Outputs) -> None:
    res = cfg["resolution"]
    if "beta" in cfg:
        chain = _settings_from(cfg, cfg.get("seed", 0)) if cfg.get("method") == "mcmc" else None
        scan = phase.low_temp_scan(
            cfg["beta"], res, method=cfg.get("method", "slawny"), band=cfg.get("band", 1.0), chain_settings=chain
        )
        columns = ["point", "e_C", "e_H", "e_F", "label", "kind", "dominant", "offset", "verdict", "annotation"]
    else:
        scan = phase.zero_temp_scan(res)
        columns = ["point", "e_C", "e_H", "e_F", "label", "kind"]
    out.csv("diagram.csv", scan.rows(), columns)
    out.svg("diagram.svg", diagram_svg(scan))
    meta = {"resolution": res, "beta": cfg.get("beta"), "method": scan.method, "histogram": scan.histogram(), "kinds": scan.kinds()}
    if scan.annotations:
        meta["annotations"] = {a or "none": scan.annotations.count(a) for a in sorted(set(scan.annotations))}
    meta["legend"] = {
        "E/C/H/F": "singleton regions (or predicted dominant class at finite beta)",
        "peierls-line": "transition line with finitely many ground configurations",
        "non-peierls-line": "E-C, H-F or C-H line",
        "multi-point": "triple points",
        "band": "bulk points within band/beta of a non-Peierls line",
    }
    out.json("diagram.json", meta)


def cmd_uniqueness(cfg: dict, out: Outputs) -> None:
    e = model_from(cfg)
    label = classify(e)
    on_line = uniqueness._on_uniqueness_line(e)
    if not on_line:
        print(f"warning: {label.name} point is not on the E-C/H-F uniqueness line; only certificates computed", file=sys.stderr)
    temps = cfg.get("temperatures", [0.05, 0.1, 0.5, 1.0, 10.0])
    certs = [uniqueness.disagreement_certificate(e, T) for T in temps]
    rows = [
        {"T": c.T, "p_i": c.p_i, "margin": c.margin, "unique": c.unique,
         "witness_a": "".join(map(str, c.witness[0])), "witness_b": "".join(map(str, c.witness[1]))}
        for c in certs
    ]  # fmt: skip
    out.csv("certificates.csv", rows)
    report = {"model": e.to_json(), "region_label": label.name, "on_uniqueness_line": on_line,
              "certificates": [c.to_json() for c in certs]}  # fmt: skip
    if on_line:
        lat = cfg.get("lattice", {"width": 3, "height": 6})
        torus = make_torus(lat["width"], lat["height"])
        betas = cfg.get("betas", [0, 1, 2, 3, 4, 5, 6, 7, 8])
        nd = uniqueness.no_domination_check(e, torus, betas)
        out.csv("no_domination.csv", nd.rows())
        report["no_domination"] = nd.to_json()
        if label.name == "E-C":
            dec = uniqueness.chessboard_decay_report(e, torus, betas)
            out.csv("decay.csv", dec.rows())
            report["decay"] = dec.to_json()
            host = make_torus(9, 9)
            core = [host.face_id(4, 4), host.face_id(5, 4), host.face_id(4, 5)]
            interior = ball_faces(host, core, cfg.get("convergence_radius", 1))
            dom = make_domain(host, interior, np.zeros(host.n_faces, dtype=np.uint8))
            conv = uniqueness.hard_hexagon_convergence(dom, e, cfg.get("convergence_betas", [1, 2, 4, 8, 10]))
            out.csv("convergence.csv", conv.rows())
            report["convergence"] = conv.to_json()
            T_ind = cfg.get("independence_T", 1.0)
            try:
                ind = uniqueness.boundary_independence_check(
                    e, T_ind, np.zeros(host.n_faces, np.uint8), np.ones(host.n_faces, np.uint8), host, core
                )
                report["boundary_independence"] = ind.to_json()
            except HadwigerError as exc:
                report["boundary_independence"] = {"error": str(exc)}
    out.json("report.json", report)


def cmd_render(cfg: dict, out: Outputs) -> None:
    if "input" in cfg:
        config = read_configuration(cfg["input"])
    elif "ground" in cfg and "lattice" in cfg:
        host = make_torus(cfg["lattice"]["width"], cfg["lattice"]["height"])
        ident = cfg["ground"]
        refs = ground_references(RegionLabel.parse(ident.rstrip("012")), host)
        match = [r for r in refs if r.ident == ident]
        if not match:
            raise ValidationError(f"unknown ground configuration {ident!r}")
        config = match[0].config
    else:
        raise ValidationError("render needs 'input' or both 'ground' and 'lattice'")
    out.svg("render.svg", configuration_svg(config, cfg.get("size", 20.0), cfg.get("overlay", False)))


COMMANDS = {
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "phase-scan": cmd_phase_scan,
    "uniqueness": cmd_uniqueness,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hadwiger", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, help="worker cap (default: $HADWIGER_THREADS or all cores)")
        p.add_argument("--out", help="existing output directory (default: .)")
        if name == "render":
            p.add_argument("--input", help="configuration file to draw (instead of --config)")
            p.add_argument("--overlay", action="store_true", help="colour vertices by state")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config)
        elif args.command == "render" and args.input:
            cfg = {"version": FORMAT_VERSION, "command": "render", "input": args.input}
        else:
            raise ValidationError("--config is required")
        if not isinstance(cfg, dict):
            raise ValidationError("run config must be a JSON object")
        cfg = dict(cfg)
        cfg.setdefault("command", args.command)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.command == "render" and args.overlay:
            cfg["overlay"] = True
        validate_config(args.command, cfg)
        if args.threads is not None:
            if args.threads < 1:
                raise ValidationError("--threads must be positive")
            os.environ["HADWIGER_THREADS"] = str(args.threads)
        out_dir = Path(args.out or ".")
        if not out_dir.is_dir():
            raise ValidationError(f"output directory {out_dir} does not exist")
        outputs = Outputs(out_dir, cfg)
        COMMANDS[args.command](cfg, outputs)
    except TooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (HadwigerError, ConfigFileError, KeyError, TypeError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    for p in outputs.written:
        print(p, file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
