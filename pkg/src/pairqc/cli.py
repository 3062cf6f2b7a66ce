"""Command-line experiment driver.

Usage::

    pairqc run CONFIG.json [--seed S] [--shots K] [--out DIR] [--qpe-in-loop]

The config is a flat JSON object naming one experiment. Flags override
the matching file keys. Each run writes ``<experiment>.json`` (config echo,
version, wall time, payload, oracle references) and one or more CSV files
into the output directory.

Exit codes: 0 ok, 2 bad config, 3 convergence failure, 4 oracle size guard.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from importlib import metadata
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError, ConvergenceError, EmptySectorError, OracleGuardError
from .krylov import KrylovConfig
from .pairing import PairingSpec, exact_spectrum, hf_energy
from .spectra import TrotterConfig

log = logging.getLogger("pairqc")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_GUARD = 0, 2, 3, 4

EXPERIMENTS = ("vqe-sweep", "qpe-spectrum", "krylov-scan", "qp-krylov", "exact", "resources")

# key -> (accepted types, default)
SCHEMA: dict[str, tuple[tuple[type, ...], object]] = {
    "experiment": ((str,), None),
    "n_levels": ((int,), 8),
    "g": ((int, float), 0.5),
    "target_pairs": ((int,), 4),
    "epsilons": ((list, type(None)), None),
    "g_values": ((list, type(None)), None),
    "modes": ((list,), ["BCS", "QPAV", "QVAP"]),
    "initial": ((list,), list(ex.INITIAL_STATES)),
    "n_q": ((int, list), [4, 6, 8]),
    "shots": ((int,), 0),
    "M_max": ((int,), 20),
    "d_tau": ((int, float), 0.3),
    "threshold": ((int, float), 1e-6),
    "dt": ((int, float), 1e-2),
    "evolution": ((str,), "trotter"),
    "two_sided": ((bool,), False),
    "excitation_set": ((list,), [2]),
    "accuracy_percent": ((int, float), 1.0),
    "seed": ((int, type(None)), None),
    "qpe_in_loop": ((bool,), False),
    "out": ((str,), "results"),
}


def load_config(path: str | Path, overrides: dict | None = None) -> dict:
    """Read, validate and complete a config; raise :class:`ConfigError` on any problem."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return validate_config(raw)


def validate_config(raw: dict) -> dict:
    unknown = sorted(set(raw) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = {}
    for key, (types, default) in SCHEMA.items():
        value = raw.get(key, default)
        # bool is an int subclass; keep the two apart
        if isinstance(value, bool) and bool not in types:
            raise ConfigError(f"{key}: expected {'/'.join(t.__name__ for t in types)}, got bool")
        if not isinstance(value, types):
            raise ConfigError(f"{key}: expected {'/'.join(t.__name__ for t in types)}, got {type(value).__name__}")
        cfg[key] = value
    if cfg["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}; got {cfg['experiment']!r}")
    if cfg["evolution"] not in ("trotter", "exact"):
        raise ConfigError("evolution must be 'trotter' or 'exact'")
    if cfg["shots"] < 0 or cfg["M_max"] < 1:
        raise ConfigError("shots must be >= 0 and M_max >= 1")
    if isinstance(cfg["n_q"], int):
        cfg["n_q"] = [cfg["n_q"]]
    for name in cfg["initial"]:
        if name not in ex.INITIAL_STATES:
            raise ConfigError(f"unknown initial state {name!r}")
    try:
        spec_of(cfg)
        krylov_config_of(cfg)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    return cfg


def spec_of(cfg: dict) -> PairingSpec:
    return PairingSpec.from_dict(
        {k: cfg[k] for k in ("n_levels", "g", "target_pairs", "epsilons")}
    )


def krylov_config_of(cfg: dict) -> KrylovConfig:
    return KrylovConfig(
        m_max=cfg["M_max"],
        d_tau=float(cfg["d_tau"]),
        threshold=float(cfg["threshold"]),
        shots=cfg["shots"],
        trotter=TrotterConfig(float(cfg["dt"]), cfg["evolution"]),
        seed=cfg["seed"],
        two_sided=cfg["two_sided"],
    )


def _cell(v) -> str:
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, table: ex.Table) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.header)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def execute(cfg: dict) -> tuple[dict[str, ex.Table], dict]:
    """Run the configured experiment; return CSV tables and extra payload fields."""
    spec = spec_of(cfg)
    kind = cfg["experiment"]
    seed = cfg["seed"]
    extra: dict = {}
    if kind == "vqe-sweep":
        grid = cfg["g_values"] or ex.default_g_grid()
        return {"vqe-sweep": ex.vqe_sweep(spec, grid, cfg["modes"], seed=seed, shots=cfg["shots"],
                                          qpe_in_loop=cfg["qpe_in_loop"])}, extra
    if kind == "qpe-spectrum":
        t = ex.qpe_spectra(spec, cfg["n_q"], cfg["initial"], shots=cfg["shots"], dt=float(cfg["dt"]),
                           method=cfg["evolution"], seed=seed)
        return {"qpe-spectrum": t}, extra
    if kind == "krylov-scan":
        t, _ = ex.krylov_scans(spec, krylov_config_of(cfg), cfg["initial"], seed=seed)
        return {"krylov-scan": t}, extra
    if kind == "qp-krylov":
        return {"qp-krylov": ex.qp_krylov(spec, krylov_config_of(cfg), cfg["excitation_set"], seed=seed)}, extra
    if kind == "exact":
        extra["E_HF"] = hf_energy(spec)
        return {"exact": ex.exact_table(spec)}, extra
    # resources
    _, scans = ex.krylov_scans(spec, krylov_config_of(cfg), cfg["initial"], seed=seed)
    return {
        "resources": ex.resources_report(spec, cfg["n_q"], scans),
        "resources-match": ex.resource_match(spec, scans, float(cfg["accuracy_percent"])),
    }, extra


def run(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    tables, extra = execute(cfg)
    wall = time.perf_counter() - start
    spec = spec_of(cfg)
    for name, table in tables.items():
        write_csv(out / f"{name}.csv", table)
    record = {
        "config": cfg,
        "version": _version(),
        "wall_time_s": wall,
        "payload": {name: {"header": t.header, "rows": t.rows} for name, t in tables.items()} | extra,
        "oracle": {
            "sector_ground_energy": float(exact_spectrum(spec)[0]),
            "hf_energy": hf_energy(spec),
            "source": "dense sector Hamiltonian, Jacobi diagonalization",
        },
    }
    path = out / f"{cfg['experiment']}.json"
    path.write_text(json.dumps(record, indent=2, allow_nan=True) + "\n", encoding="utf-8")
    return path


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pairqc", description="Pairing-model quantum algorithm experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--shots", type=int)
    r.add_argument("--out")
    r.add_argument("--qpe-in-loop", action="store_true", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s %(message)s")
    overrides = {"seed": args.seed, "shots": args.shots, "out": args.out, "qpe_in_loop": args.qpe_in_loop}
    try:
        cfg = load_config(args.config, overrides)
        path = run(cfg)
    except ConfigError as e:
        log.error("config error: %s", e)
        return EXIT_CONFIG
    except (ConvergenceError, EmptySectorError) as e:
        log.error("convergence failure: %s", e)
        return EXIT_CONVERGENCE
    except OracleGuardError as e:
        log.error("oracle guard: %s", e)
        return EXIT_GUARD
    log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
