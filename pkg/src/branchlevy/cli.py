"""Batch front-end: load a model config, run a command, write CSV artifacts.

Commands: ``simulate``, ``verify``, ``kappa``, ``check-measure``,
``nested``.  Every output file starts with a comment line carrying the
manifest hash; identical manifests produce byte-identical outputs.

Exit codes: 0 all requested checks pass, 1 check failure, 2 config
error (including an inadmissible model), 3 particle-budget abort.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .genealogy import export_lines, snapshot
from .levy_measure import (
    CharacteristicTriple,
    check_admissible,
    check_support_negative,
    decompose,
    kappa,
    kappa_truncated,
    triple_from_dict,
)
from .simulator import (
    ParticleBudgetError,
    SimulationConfig,
    _simulate,
    simulate_nested,
    substream,
)
from .verify import REPORT_COLUMNS, report_row, standard_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_BUDGET_ABORT = 3


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str
    out_dir: str
    seed: int = 0
    replicas: int = 200
    k: float = 3.0
    levels: tuple[float, ...] | None = None


def manifest_hash(manifest: RunManifest, config: dict) -> str:
    payload = {
        "command": manifest.command,
        "config": config,
        "seed": manifest.seed,
        "replicas": manifest.replicas,
        "k": manifest.k,
        "levels": manifest.levels,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _write_csv(path: Path, mhash: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest_hash={mhash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load(manifest: RunManifest) -> tuple[dict, CharacteristicTriple]:
    with open(manifest.config_path) as fh:
        config = json.load(fh)
    triple = triple_from_dict(config["model"])
    return config, triple


def _sim_level(config: dict, triple: CharacteristicTriple) -> float:
    level = config.get("level")
    if level is not None:
        return float(level)
    ident = triple.lam.identity_level()
    if ident is None:
        raise ValueError("config must set 'level' for an infinite measure family")
    return ident


def _obs_times(config: dict, horizon: float) -> tuple[float, ...]:
    return tuple(float(x) for x in config.get("observation_times", (horizon,)))


def run(manifest: RunManifest) -> int:
    try:
        config, triple = _load(manifest)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mhash = manifest_hash(manifest, config)

    if manifest.command == "check-measure":
        return _cmd_check_measure(manifest, config, triple, out, mhash)

    admissibility = check_admissible(triple)
    if not admissibility.passed:
        print(f"inadmissible model: {admissibility}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    try:
        if manifest.command == "simulate":
            return _cmd_simulate(manifest, config, triple, out, mhash)
        if manifest.command == "verify":
            return _cmd_verify(manifest, config, triple, out, mhash)
        if manifest.command == "kappa":
            return _cmd_kappa(manifest, config, triple, out, mhash)
        if manifest.command == "nested":
            return _cmd_nested(manifest, config, triple, out, mhash)
    except ParticleBudgetError as exc:
        print(f"budget abort: {exc}", file=sys.stderr)
        return EXIT_BUDGET_ABORT
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    print(f"unknown command: {manifest.command}", file=sys.stderr)
    return EXIT_CONFIG_ERROR


def _cmd_simulate(manifest, config, triple, out: Path, mhash: str) -> int:
    horizon = float(config.get("horizon", 1.0))
    obs = _obs_times(config, horizon)
    level = _sim_level(config, triple)
    params = decompose(triple, level)
    max_particles = int(config.get("max_particles", 1_000_000))

    snap_rows: list[list] = []
    forest_lines: list[str] = []
    for rep in range(manifest.replicas):
        forest = _simulate(params, horizon, obs, substream(manifest.seed, 0, rep), max_particles)
        for t in obs:
            measure = snapshot(forest, t)[0]
            snap_rows.append([rep, repr(t), len(measure)] + [repr(a) for a in measure])
        for line in export_lines(forest):
            forest_lines.append(f"{rep}\t{line}")

    _write_csv(out / "snapshots.csv", mhash, ["replica", "time", "n_atoms", "atoms..."], snap_rows)
    with open(out / "forests.txt", "w") as fh:
        fh.write(f"# manifest_hash={mhash}\n")
        fh.write("# replica<TAB>label;birth;death;kind;birth_pos;shift;events\n")
        for line in forest_lines:
            fh.write(line + "\n")
    print(f"simulate: wrote {len(snap_rows)} snapshots for {manifest.replicas} replicas")
    return EXIT_OK


def _cmd_verify(manifest, config, triple, out: Path, mhash: str) -> int:
    vcfg = config.get("verify", {})
    reports = standard_suite(
        triple,
        t=float(vcfg.get("t", 1.0)),
        n_replicas=manifest.replicas,
        seed=manifest.seed,
        k=manifest.k,
        level=config.get("level"),
        frequencies=tuple(float(r) for r in vcfg.get("frequencies", (1.0,))),
        censor_levels=tuple(float(n) for n in vcfg.get("censor_levels", ())),
        max_particles=int(config.get("max_particles", 1_000_000)),
    )
    _write_csv(out / "report.csv", mhash, list(REPORT_COLUMNS), [report_row(r) for r in reports])
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}[{r.params}] z={r.z_score:.3f}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def _cmd_kappa(manifest, config, triple, out: Path, mhash: str) -> int:
    gcfg = config.get("kappa_grid", {})
    r_min = float(gcfg.get("r_min", -2.0))
    r_max = float(gcfg.get("r_max", 2.0))
    count = int(gcfg.get("count", 41))
    th = triple.theta.value
    rows = []
    for i in range(count):
        r = r_min + (r_max - r_min) * i / (count - 1) if count > 1 else r_min
        val = kappa(triple, complex(th, r))
        rows.append([repr(r), repr(val.real), repr(val.imag)])
    _write_csv(out / "kappa.csv", mhash, ["r", "re_kappa", "im_kappa"], rows)
    print(f"kappa: tabulated {count} frequencies at theta={th}")
    return EXIT_OK


def _cmd_check_measure(manifest, config, triple, out: Path, mhash: str) -> int:
    adm = check_admissible(triple)
    sup = check_support_negative(triple)
    rows = [
        ["square_integrable_x1", adm.square.status, repr(adm.square.value)],
        ["upper_exponential_tail", adm.upper_tail.status, repr(adm.upper_tail.value)],
        ["offspring_exponential_weight", adm.offspring.status, repr(adm.offspring.value)],
        ["support_no_upward_motion", str(sup.no_upward_motion), ""],
        ["support_finite_variation", sup.finite_variation.status, repr(sup.finite_variation.value)],
        ["support_nonpositive_drift", str(sup.nonpositive_drift), repr(sup.drift_value)],
        ["support_negative_half_line", str(sup.supported), ""],
    ]
    _write_csv(out / "measure_report.csv", mhash, ["condition", "status", "value"], rows)
    for name, status, value in rows:
        print(f"{name}: {status} {value}")
    return EXIT_OK if adm.passed else EXIT_CHECK_FAILED


def _cmd_nested(manifest, config, triple, out: Path, mhash: str) -> int:
    levels = manifest.levels or tuple(float(x) for x in config.get("levels", ()))
    if not levels:
        raise ValueError("nested command needs --levels or 'levels' in the config")
    levels = tuple(sorted(set(levels)))
    horizon = float(config.get("horizon", 1.0))
    obs = _obs_times(config, horizon)
    sim = SimulationConfig(
        horizon=horizon,
        observation_times=obs,
        seed=manifest.seed,
        max_particles=int(config.get("max_particles", 1_000_000)),
        triple=triple,
        level=levels[-1],
    )
    th = triple.theta.value
    ident = triple.lam.identity_level()
    kap_full = kappa(triple, th).real

    violations = 0
    audit_rows: list[list] = []
    for rep in range(manifest.replicas):
        forests = simulate_nested(sim, levels, substream(manifest.seed, 0, rep))
        for lo, hi in zip(levels, levels[1:]):
            for t in obs:
                small = Counter(snapshot(forests[lo], t)[0].atoms)
                big = Counter(snapshot(forests[hi], t)[0].atoms)
                bad = sum((small - big).values())
                violations += bad
                if bad:
                    audit_rows.append([rep, repr(lo), repr(hi), repr(t), bad])

    gap_rows = []
    for n in levels:
        if ident is not None and n >= ident:
            kap_n = kap_full
        else:
            kap_n = kappa_truncated(triple, n, th).real
        gap_rows.append([repr(n), repr(kap_full - kap_n)])

    _write_csv(
        out / "nested_audit.csv", mhash,
        ["replica", "level_small", "level_big", "time", "missing_atoms"], audit_rows,
    )
    _write_csv(out / "kappa_gap.csv", mhash, ["level", "kappa_gap_at_theta"], gap_rows)
    print(
        f"nested: {manifest.replicas} replicas, levels {list(levels)}, "
        f"{violations} inclusion violations"
    )
    return EXIT_OK if violations == 0 else EXIT_CHECK_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="branchlevy",
        description="Simulate branching Lévy processes and verify their identities.",
    )
    parser.add_argument(
        "command",
        choices=["simulate", "verify", "kappa", "check-measure", "nested"],
    )
    parser.add_argument("--config", required=True, help="path to a JSON model config")
    parser.add_argument("--out", required=True, help="output directory for artifacts")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--replicas", type=int, default=200)
    parser.add_argument("--k", type=float, default=3.0, help="pass threshold in standard errors")
    parser.add_argument("--levels", type=str, default=None, help="comma-separated truncation levels")
    args = parser.parse_args(argv)

    levels = None
    if args.levels:
        levels = tuple(float(x) for x in args.levels.split(","))
    manifest = RunManifest(
        command=args.command,
        config_path=args.config,
        out_dir=args.out,
        seed=args.seed,
        replicas=args.replicas,
        k=args.k,
        levels=levels,
    )
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
