"""Command-line driver.

    chebolab orbits  --family cat --numax 5
    chebolab density --family modular --mod 2 --maxlen 18
    chebolab zeta    --family cat --numax 10 --mod 2
    chebolab split   --group S4 --mu 0 --lam 5 [--subgroup 0,1]
    chebolab sweep   --order-bound 16
    chebolab lgp     --n 50 --bound 10 --p 3 --trials 200 --seed 0
    chebolab verify  [--tolerance 0.05] [--only 1,3]

Settings come from built-in defaults, then ``--config FILE`` (flat
``key = value`` lines, ``#`` comments), then explicit flags.  Every
command writes its files into ``--out`` (default ``.``).

Exit codes: 0 pass, 1 usage/config error, 2 invariant violation (a
``violations.json`` report is written), 3 tolerance failure.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import acceptance, covers, density, fingroup, localglobal, oracles, orbitgen
from .errors import LabError
from .grouplib import by_label

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_TOLERANCE = 0, 1, 2, 3


def _floats(text):
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


# key -> (parser, default)
SCHEMA = {
    "family": (str, "cat"),
    "matrix": (_ints, (2, 1, 1, 1)),
    "numax": (int, 8),
    "maxlen": (int, 12),
    "input": (str, ""),
    "include_origin": (_bool, False),
    "mod": (int, 2),
    "group": (str, ""),
    "images": (_ints, ()),
    "scheme": (str, "prime"),
    "s_grid": (_floats, density.DEFAULT_S_GRID),
    "tolerance": (float, density.DEFAULT_TOLERANCE),
    "skip_first": (int, 0),
    "stride": (int, 1),
    "workers": (int, 1),
    "seed": (int, 0),
    "out": (str, "."),
    "mu": (int, 0),
    "lam": (int, 0),
    "subgroup": (_ints, ()),
    "order_bound": (int, 16),
    "p": (int, 3),
    "n": (int, 50),
    "bound": (int, 10),
    "s_size": (int, 3),
    "trials": (int, 200),
    "threshold": (float, 0.9),
    "control": (_bool, False),
    "linking": (str, ""),
    "indices": (_ints, ()),
    "only": (_ints, ()),
}


class ConfigError(LabError):
    def __init__(self, message):
        super().__init__("CONFIG_INVALID", message)


class InvariantViolation(Exception):
    def __init__(self, violations: list[dict]):
        self.violations = violations
        super().__init__(f"{len(violations)} invariant violations")


class ToleranceFailure(Exception):
    pass


def read_config_file(path: str) -> dict:
    if not Path(path).is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LabError("IO_ERROR", f"cannot read config {path}: {exc}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def resolve_config(file_values: dict, overrides: dict) -> dict:
    cfg = {k: default for k, (_, default) in SCHEMA.items()}
    for source in (file_values, overrides):
        for k, v in source.items():
            if v is None:
                continue
            if k not in SCHEMA:
                raise ConfigError(f"unknown setting {k!r}")
            parse = SCHEMA[k][0]
            try:
                cfg[k] = v if not isinstance(v, str) else parse(v)
            except ValueError:
                raise ConfigError(f"bad value for {k}: {v!r}") from None
    cfg["family"] = cfg["family"].lower()
    if cfg["family"] not in ("cat", "modular", "import"):
        raise ConfigError(f"family must be cat, modular or import, not {cfg['family']!r}")
    if cfg["scheme"].lower() not in ("prime", "geometric"):
        raise ConfigError("scheme must be prime or geometric")
    if len(cfg["matrix"]) != 4:
        raise ConfigError("matrix needs four comma-separated entries a,b,c,d")
    for key in ("input", "group", "linking"):
        if cfg[key] and not Path(cfg[key]).exists() and not (key == "group" and _is_library_label(cfg[key])):
            raise ConfigError(f"{key} file {cfg[key]!r} does not exist")
    return cfg


def _is_library_label(text: str) -> bool:
    try:
        by_label(text)
        return True
    except KeyError:
        return False


# --------------------------------------------------------------------------
# shared pipeline pieces


def _matrix(cfg):
    a, b, c, d = cfg["matrix"]
    return ((a, b), (c, d))


def _load_group(source: str) -> fingroup.FiniteGroup:
    if _is_library_label(source):
        return by_label(source)
    text = Path(source).read_text()
    if source.endswith(".csv"):
        return fingroup.group_from_csv(text, Path(source).stem)
    return fingroup.group_from_json(text)


def load_knots(cfg):
    """Ordered knots for the configured family (a CatOrbitTable for cat)."""
    fam = cfg["family"]
    if fam == "cat":
        table = orbitgen.cat_orbit_table(_matrix(cfg), cfg["numax"], cfg["include_origin"], cfg["workers"])
        knots = table
    elif fam == "modular":
        knots = orbitgen.order_knots(orbitgen.modular_geodesics(cfg["maxlen"]))
    else:
        if not cfg["input"]:
            raise ConfigError("family import needs --input")
        try:
            text = Path(cfg["input"]).read_text()
        except OSError as exc:
            raise LabError("IO_ERROR", str(exc)) from None
        knots = orbitgen.knots_from_jsonl(text)
    if len(knots) == 0:
        raise LabError("DATASET_EMPTY", "the configured family has no knots")
    return knots


def _knot_family(knots) -> str:
    if isinstance(knots, orbitgen.CatOrbitTable):
        return "cat"
    return knots[0].family


def build_quotient(cfg, family: str) -> fingroup.QuotientMap:
    if cfg["group"]:
        G = _load_group(cfg["group"])
        model = (fingroup.SourceModel.SEMIDIRECT_Z2_Z if family == "cat"
                 else fingroup.SourceModel.FREE_PROD_Z2_Z3)
        matrix = _matrix(cfg) if family == "cat" else None
        return fingroup.QuotientMap(model, tuple(cfg["images"]), G, matrix)
    if family == "cat":
        return fingroup.semidirect_quotient(cfg["mod"], _matrix(cfg))[1]
    return fingroup.psl2_quotient(cfg["mod"])[1]


def _lengths(knots, cfg):
    scheme = (orbitgen.LengthScheme.PRIME_NUMBER if cfg["scheme"].lower() == "prime"
              else orbitgen.LengthScheme.GEOMETRIC)
    return orbitgen.assign_lengths(knots, scheme, _matrix(cfg))


def _write(out_dir: Path, name: str, text: str) -> Path:
    path = out_dir / name
    try:
        path.write_text(text)
    except OSError as exc:
        raise LabError("IO_ERROR", f"cannot write {path}: {exc}") from None
    return path


# --------------------------------------------------------------------------
# commands; each returns a list of stdout lines and raises on failure


def cmd_orbits(cfg, out: Path):
    knots = load_knots(cfg)
    fam = _knot_family(knots)
    prime = orbitgen.assign_lengths(knots, "PRIME_NUMBER").lengths
    geo = orbitgen.assign_lengths(knots, "GEOMETRIC", _matrix(cfg)).lengths
    violations = []
    if isinstance(knots, orbitgen.CatOrbitTable):
        counts = knots.fixed_point_counts()
        A = _matrix(cfg)
        for nu, c in sorted(counts.items()):
            want = oracles.det_count(A, nu)
            if c != want:
                violations.append({"check": "fixed_point_count", "period": nu, "got": c, "expected": want})
        summary = {"family": "cat", "knots": len(knots),
                   "orbits_per_period": {str(nu): int(np.sum(knots.period == nu))
                                         for nu in range(1, cfg["numax"] + 1)},
                   "fixed_point_counts": [counts[nu] for nu in sorted(counts)]}
        knot_list = list(knots)
    else:
        knot_list = list(knots)
        for k in knot_list:
            if isinstance(k, orbitgen.GeodesicClass) and (k.trace < 3 or orbitgen.word_trace(k.word) != k.trace):
                violations.append({"check": "trace", "word": list(k.word), "trace": k.trace})
        lens = [k.letter_count if isinstance(k, orbitgen.GeodesicClass) else k.period for k in knot_list]
        summary = {"family": fam, "knots": len(knot_list),
                   "per_length": {str(n): lens.count(n) for n in sorted(set(lens))}}
    text = orbitgen.knots_to_jsonl(knot_list, prime, geo) + json.dumps({"summary": summary}, sort_keys=True) + "\n"
    _write(out, "orbits.jsonl", text)
    if violations:
        raise InvariantViolation(violations)
    return [json.dumps(summary, sort_keys=True)]


def _tagged(cfg):
    knots = load_knots(cfg)
    q = build_quotient(cfg, _knot_family(knots))
    tags = orbitgen.frobenius_class_indices(knots, q)
    return knots, q.target, tags, _lengths(knots, cfg)


def cmd_density(cfg, out: Path):
    knots, G, tags, lengths = _tagged(cfg)
    rep = density.density_report(G, tags, lengths, cfg["s_grid"], cfg["skip_first"])
    eq = density.equivalence_from_report(rep)
    _write(out, "density.csv", rep.to_csv())
    _write(out, "density.json", rep.to_json())
    _write(out, "running.csv", density.running_series_csv(tags, G, cfg["skip_first"], cfg["stride"]))
    if abs(sum(st.count for st in rep.per_class.values()) - rep.total_knots) != 0:
        raise InvariantViolation([{"check": "class_counts_sum", "total": rep.total_knots}])
    dev = rep.max_natural_deviation()
    lines = [rep.to_csv().rstrip("\n"),
             f"max |natural - expected| = {dev:.6f}; max |natural - Dirichlet| = {eq.max_discrepancy:.6f}"]
    if dev > cfg["tolerance"]:
        raise ToleranceFailure("\n".join(lines + [f"TOLERANCE_FAIL: deviation exceeds {cfg['tolerance']}"]))
    return lines


def cmd_zeta(cfg, out: Path):
    knots, G, tags, lengths = _tagged(cfg)
    skip = cfg["skip_first"]
    rows = ["s,class_rep,log_zeta_relative"]
    violations = []
    for s in cfg["s_grid"]:
        total = density.log_zeta_partial(lengths, s, skip_first=skip)
        parts = [density.log_zeta_partial(lengths, s, skip_first=skip, mask=tags == i)
                 for i in range(len(G.classes))]
        for c, v in zip(G.classes, parts):
            rows.append(f"{s:g},{c.representative},{v:.17g}")
        rows.append(f"{s:g},all,{total:.17g}")
        err = abs(math.expm1(math.fsum(parts) - total))
        if err > 1e-12:
            violations.append({"check": "zeta_partition", "s": s, "relative_error": err})
    _write(out, "zeta.csv", "\n".join(rows) + "\n")
    if violations:
        raise InvariantViolation(violations)
    return rows


def cmd_split(cfg, out: Path):
    if not cfg["group"]:
        raise ConfigError("split needs --group (library label or JSON/CSV file)")
    G = _load_group(cfg["group"])
    p = covers.PeripheralImage(cfg["mu"], cfg["lam"], G)
    H = cfg["subgroup"] or None
    d = covers.splitting_data(p, H)
    payload = d.to_dict()
    payload["group"] = G.label
    payload["induced_length_factor"] = {c.value: covers.induced_length(1.0, d, c) for c in covers.InducedLength}
    text = json.dumps(payload, sort_keys=True)
    _write(out, "splitting.json", text + "\n")
    violations = []
    if d.e * d.f * d.g != G.order or not d.I <= d.D:
        violations.append({"check": "hilbert", "e": d.e, "f": d.f, "g": d.g, "order": G.order})
    if H is not None and sum(c.e * c.f for c in d.components) != G.order // len(set(H)):
        violations.append({"check": "component_degrees", "subgroup": sorted(set(H))})
    if violations:
        raise InvariantViolation(violations)
    return [text]


def cmd_sweep(cfg, out: Path):
    rep = covers.split_rigidity_sweep(cfg["order_bound"], workers=cfg["workers"])
    _write(out, "sweep.csv", rep.to_csv())
    if rep.counterexamples:
        raise InvariantViolation([{"check": "split_rigidity", "group": r.group,
                                   "a": list(r.subgroup_a), "b": list(r.subgroup_b)}
                                  for r in rep.counterexamples])
    return [rep.summary()]


def cmd_lgp(cfg, out: Path):
    lines = []
    if cfg["linking"]:
        L = localglobal.linking_from_csv(Path(cfg["linking"]).read_text())
        S = list(cfg["indices"])
        surj, rank = localglobal.surjectivity_check(L, cfg["p"], S)
        kernel = localglobal.injectivity_check(L, cfg["p"], S)
        rec = localglobal.reciprocity_check(L, cfg["p"], 100, cfg["seed"])
        report = {"scope": localglobal.REPORT_SCOPE, "seed": cfg["seed"], "p": cfg["p"], "n": L.n,
                  "S": S, "rank": rank, "surjective": surj, "kernel_excluding_S": kernel,
                  "reciprocity_violations": rec.violations,
                  "verdict": "PASS" if rec.ok else "FAIL"}
        _write(out, "lgp.json", json.dumps(report, sort_keys=True, indent=1) + "\n")
        if not rec.ok:
            raise InvariantViolation([{"check": "reciprocity", "violations": rec.violations}])
        return [json.dumps(report, sort_keys=True)]
    exp = localglobal.local_global_experiment(cfg["n"], cfg["bound"], cfg["p"], cfg["s_size"],
                                              cfg["trials"], cfg["seed"], cfg["control"], cfg["threshold"])
    L = localglobal.synthetic_linking_model(cfg["n"], cfg["bound"], cfg["seed"])
    rec = localglobal.reciprocity_check(L, cfg["p"], 100, cfg["seed"])
    _write(out, "lgp.json", exp.to_json() + "\n")
    _write(out, "linking.csv", localglobal.linking_to_csv(L))
    lines.append(f"surjective rate {exp.surjective_rate:.3f}, injective rate {exp.injective_rate:.3f}, "
                 f"verdict {exp.verdict}; reciprocity violations {rec.violations}")
    if not rec.ok:
        raise InvariantViolation([{"check": "reciprocity", "violations": rec.violations}])
    if exp.verdict != "PASS":
        raise ToleranceFailure(lines[0])
    return lines


def cmd_verify(cfg, out: Path):
    acfg = acceptance.AcceptanceConfig(density_tolerance=cfg["tolerance"], seed=cfg["seed"])
    lines = []
    results = acceptance.verify_all(acfg, only=cfg["only"] or None, echo=lines.append)
    summary = f"{sum(r.passed for r in results)}/{len(results)} criteria pass"
    lines.append(summary)
    statuses = {r.status for r in results}
    if statuses & {acceptance.INVARIANT_FAIL, acceptance.CRASH}:
        raise InvariantViolation([{"check": f"criterion {r.number}", "status": r.status, "detail": r.detail}
                                  for r in results if r.status in (acceptance.INVARIANT_FAIL, acceptance.CRASH)])
    if acceptance.TOLERANCE_FAIL in statuses:
        raise ToleranceFailure("\n".join(lines))
    return lines


COMMANDS = {
    "orbits": (cmd_orbits, "enumerate a knot family as JSON-lines"),
    "density": (cmd_density, "natural and Dirichlet densities per conjugacy class"),
    "zeta": (cmd_zeta, "zeta partial products and the class partition identity"),
    "split": (cmd_split, "decomposition/inertia data for one peripheral image"),
    "sweep": (cmd_sweep, "split-set rigidity sweep over the group library"),
    "lgp": (cmd_lgp, "local-global restriction experiments over F_p"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chebolab", description="Chebotarev link laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="flat key = value settings file")
        for key in SCHEMA:
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, default=None)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    overrides = {k: v for k, v in vars(args).items() if k in SCHEMA}
    out_dir = None
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve_config(file_values, overrides)
        out_dir = Path(cfg["out"])
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise LabError("IO_ERROR", f"cannot create {out_dir}: {exc}") from None
        lines = COMMANDS[args.command][0](cfg, out_dir)
    except InvariantViolation as exc:
        report = {"command": args.command, "violations": exc.violations}
        if out_dir is not None:
            _write(out_dir, "violations.json", json.dumps(report, sort_keys=True, indent=1) + "\n")
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        return EXIT_INVARIANT
    except ToleranceFailure as exc:
        print(str(exc))
        return EXIT_TOLERANCE
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for line in lines:
        print(line)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


# --------------------------------------------------------------------------
# determinism


DETERMINISM_RUNS = [
    ["orbits", "--family", "cat", "--numax", "9", "--workers", "3"],
    ["orbits", "--family", "modular", "--maxlen", "10"],
    ["density", "--family", "modular", "--mod", "2", "--maxlen", "12", "--tolerance", "1"],
    ["density", "--family", "cat", "--numax", "9", "--mod", "2", "--tolerance", "1", "--stride", "50"],
    ["zeta", "--family", "modular", "--mod", "3", "--maxlen", "10"],
    ["split", "--group", "S4", "--mu", "1", "--lam", "1", "--subgroup", "0"],
    ["sweep", "--order-bound", "12"],
    ["lgp", "--n", "20", "--trials", "30"],
]


def _run_all_into(root: Path, seed: int, subprocess_env=None) -> None:
    for i, argv in enumerate(DETERMINISM_RUNS):
        out = root / f"run{i}"
        full = argv + ["--out", str(out), "--seed", str(seed)]
        if subprocess_env is None:
            code = run(full)
        else:
            code = subprocess.run([sys.executable, "-m", "chebolab.cli", *full], env=subprocess_env,
                                  capture_output=True).returncode
        if code != EXIT_OK:
            raise RuntimeError(f"{argv[0]} exited with {code}")


def determinism_check(seed: int = 0) -> tuple[bool, list[str]]:
    """Run every command twice (in-process and in a fresh interpreter) and compare bytes."""
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp) / "a", Path(tmp) / "b"
        with contextlib.redirect_stdout(io.StringIO()):
            _run_all_into(a, seed)
        env = dict(os.environ, PYTHONHASHSEED="12345")
        _run_all_into(b, seed, subprocess_env=env)
        names = sorted(str(p.relative_to(a)) for p in a.rglob("*") if p.is_file())
        names_b = sorted(str(p.relative_to(b)) for p in b.rglob("*") if p.is_file())
        same = names == names_b and all((a / n).read_bytes() == (b / n).read_bytes() for n in names)
    return same, names


if __name__ == "__main__":
    main()
