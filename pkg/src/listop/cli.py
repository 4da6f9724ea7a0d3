"""``listop <scenario> --config <path> [--seed S] [--out PATH] [--threads K]``.

Exit status: 0 on success, 2 on a validation error, 3 when an exhaustive
enumeration would exceed the budget (``LISTOP_BUDGET`` overrides the cap),
1 on any other failure.  Partial output files are removed on failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .codeio import load_code
from .errors import BudgetError, InputError, ListopError
from .repro import resolve_cap
from .scenarios import REQUIRED, SCENARIOS, generate_base_code

CONFIG_KEYS = ("scenario", "base_code", "params", "master_seed", "output")
EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3


class ConfigError(InputError):
    """Invalid experiment configuration; the message names the offending field."""


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def resolve_config(raw: dict, scenario: str, seed=None, out=None) -> dict:
    """Validate a raw JSON config and fill in scenario defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"config: unknown keys {unknown}; allowed {list(CONFIG_KEYS)}")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
    if raw.get("scenario", scenario) != scenario:
        raise ConfigError(f"scenario: config says {raw['scenario']!r} but command line says {scenario!r}")
    sc = SCENARIOS[scenario]
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params: must be a JSON object")
    bad = sorted(set(params) - set(sc.params))
    if bad:
        raise ConfigError(f"params: unknown keys {bad} for scenario {scenario!r}; allowed {sorted(sc.params)}")
    resolved = {}
    for k, default in sc.params.items():
        if k in params:
            resolved[k] = params[k]
        elif default is REQUIRED:
            raise ConfigError(f"params.{k}: required for scenario {scenario!r}")
        else:
            resolved[k] = default
    master = seed if seed is not None else raw.get("master_seed", 0)
    try:
        master = int(master)
    except (TypeError, ValueError):
        raise ConfigError(f"master_seed: expected an integer, got {master!r}") from None
    if not 0 <= master < 1 << 64:
        raise ConfigError("master_seed: must fit in 64 bits")
    base = raw.get("base_code")
    if sc.needs_base_code and base is None:
        raise ConfigError(f"base_code: required for scenario {scenario!r}")
    if base is not None and not (isinstance(base, dict) and (("file" in base) != ("generator" in base))):
        raise ConfigError("base_code: expected {\"file\": path} or {\"generator\": name, ...}")
    output = out if out is not None else raw.get("output")
    if not output:
        raise ConfigError("output: no output path given (config 'output' or --out)")
    return {"scenario": scenario, "base_code": base, "params": resolved,
            "master_seed": master, "output": str(output)}


def _load_base(cfg: dict, config_dir: Path):
    base = cfg["base_code"]
    if base is None:
        return None
    if "file" in base:
        if set(base) != {"file"}:
            raise ConfigError("base_code: a file spec takes no other keys")
        p = Path(base["file"])
        return load_code(p if p.is_absolute() else config_dir / p)
    return generate_base_code(base, cfg["master_seed"])


def render_csv(cfg: dict, rows: list, columns: list) -> str:
    buf = io.StringIO()
    echo = {k: v for k, v in cfg.items() if k != "output"}
    buf.write("# listop " + json.dumps(echo, sort_keys=True, separators=(",", ":")) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


def run_experiment(cfg: dict, threads: int = 1, config_dir: Path = Path(".")) -> str:
    """Run a resolved config and return the CSV text."""
    sc = SCENARIOS[cfg["scenario"]]
    C0 = _load_base(cfg, config_dir)
    cap = resolve_cap(None)
    rows = sc.runner(C0, cfg["params"], cfg["master_seed"], threads, cap)
    return render_csv(cfg, rows, sc.columns)


def build_parser() -> argparse.ArgumentParser:
    cols = "\n".join(f"  {name}: {', '.join(sc.columns)}" for name, sc in SCENARIOS.items())
    parser = argparse.ArgumentParser(
        prog="listop",
        description="Random row/column operations on codes and list-decoding experiments.",
        epilog="CSV columns per scenario:\n" + cols,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("scenario", choices=sorted(SCENARIOS))
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="override master_seed")
    parser.add_argument("--out", default=None, help="override the output path")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tmp_path = None
    try:
        if args.threads < 1:
            raise ConfigError("--threads: must be >= 1")
        cfg_path = Path(args.config)
        try:
            raw = json.loads(cfg_path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"config: cannot read {cfg_path}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config: invalid JSON at line {e.lineno}: {e.msg}") from None
        cfg = resolve_config(raw, args.scenario, args.seed, args.out)
        out_path = Path(cfg["output"])
        tmp_path = out_path.with_name(out_path.name + ".partial")
        text = run_experiment(cfg, args.threads, cfg_path.parent)
        tmp_path.write_text(text, encoding="utf-8", newline="\n")
        os.replace(tmp_path, out_path)
        return EXIT_OK
    except BudgetError as e:
        code, msg = EXIT_BUDGET, f"budget error: {e}"
    except (InputError, ValueError) as e:
        code, msg = EXIT_INVALID, f"validation error: {e}"
    except ListopError as e:
        code, msg = EXIT_FAIL, f"error: {e}"
    except OSError as e:
        code, msg = EXIT_FAIL, f"error: {e}"
    if tmp_path is not None and tmp_path.exists():
        tmp_path.unlink()
    print(msg, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
