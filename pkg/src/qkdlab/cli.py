"""Command-line entry point: ``qkdlab {simulate,keyrate,pipeline,squash-check,decoy}``.

Exit codes: 0 success, 1 usage or config error, 2 protocol abort,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .bits import bits_from_str, bits_to_hex
from .keyrates import (
    DecoyData,
    RateReport,
    asymptotic_report,
    bb84_finite_key,
    bb84_rate,
    decoy_bounds,
    lm05_rate,
    sdc_rate,
    synthesize,
)
from .keyrates.report import dumps
from .postprocess.pipeline import PipelineConfig, process_keys, replay, run_pipeline
from .protocols import ConfigError, ProtocolConfig, simulate
from .quantum import Povm
from .squashing import SquashProblem, check_feasibility, noise_to_feasibility, preset_problem

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_NUMERIC = 0, 1, 2, 3
MAX_SEED = 2**64 - 1


class CliError(Exception):
    """Usage or configuration problem; reported with exit code 1."""


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        raise CliError("--config is required")
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise CliError("config must be a JSON object")
    return data


def _require_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise CliError(f"{args.command} is stochastic and needs --seed")
    return args.seed


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed {text!r} is not an integer") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args: argparse.Namespace) -> tuple[str, int]:
    data = _load_config(args.config)
    seed = _require_seed(args)
    config = ProtocolConfig.from_dict({**data, "seed": seed})
    result = simulate(config, workers=args.workers)
    key_rounds = result.summary.get("sifted", result.summary.get("conclusive", result.summary.get("key_rounds")))
    code = EXIT_OK if key_rounds else EXIT_ABORT
    if args.format == "csv":
        return result.records.to_csv(), code
    return dumps({"config": config.to_dict(), "seed": seed, "summary": result.summary}), code


# ---------------------------------------------------------------------------
# keyrate


def _depolarized_symbols(e: float) -> list[float]:
    return [1 - e, e / 3, e / 3, e / 3]


def _point_report(protocol: str, p: dict[str, Any]) -> RateReport:
    if protocol == "bb84":
        q_x = p.get("q_x", p.get("q"))
        q_z = p.get("q_z", q_x)
        if q_x is None:
            raise CliError("bb84 needs q or q_x")
        return asymptotic_report("bb84", {"q_x": q_x, "q_z": q_z}, bb84_rate(q_x, q_z))
    if protocol == "lm05":
        q = p.get("q")
        args = [p.get(name, q) for name in ("q_g0", "q_g1", "q_f")]
        if any(a is None for a in args):
            raise CliError("lm05 needs q or all of q_g0, q_g1, q_f")
        return asymptotic_report("lm05", dict(zip(("q_g0", "q_g1", "q_f"), args)), lm05_rate(*args))
    if protocol == "sdc":
        if "q" in p:
            q_g = q_f = _depolarized_symbols(p["q"])
        else:
            q_g, q_f = p.get("q_g"), p.get("q_f")
        if q_g is None or q_f is None:
            raise CliError("sdc needs q or both q_g and q_f")
        return asymptotic_report("sdc", {"q_g": list(q_g), "q_f": list(q_f)}, sdc_rate(q_g, q_f))
    if protocol == "bb84-finite":
        try:
            n, qber = int(p["n"]), float(p["qber"])
        except KeyError as exc:
            raise CliError(f"bb84-finite needs {exc.args[0]}") from None
        eps = float(p.get("eps", 1e-10))
        fk = bb84_finite_key(n, qber, eps=eps)
        third = eps / 3
        return RateReport("bb84-finite", {"n": n, "qber": qber, "eps": eps}, hmin=fk.hmin_bound,
                          hmax=fk.hmax_bound, leak=fk.leak, eps_pe=third, eps_cor=third, eps_pa=third,
                          length=fk.length, abort=fk.abort)
    raise CliError(f"unknown keyrate protocol {protocol!r}")


def _sweep_grid(sweep: dict[str, Any]) -> tuple[str, np.ndarray]:
    try:
        start, stop, step = float(sweep["start"]), float(sweep["stop"]), float(sweep["step"])
    except KeyError as exc:
        raise CliError(f"sweep needs {exc.args[0]}") from None
    if step <= 0 or stop < start:
        raise CliError("sweep needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return str(sweep.get("param", "q")), np.round(start + step * np.arange(count), 12)


def cmd_keyrate(args: argparse.Namespace) -> tuple[str, int]:
    data = dict(_load_config(args.config))
    protocol = data.pop("protocol", None)
    if protocol is None:
        raise CliError("keyrate config needs a protocol")
    sweep = data.pop("sweep", None)
    try:
        if sweep is None:
            report = _point_report(protocol, data)
            if args.format == "csv":
                key = "rate" if report.rate is not None else "length"
                value = report.rate if report.rate is not None else report.length
                return _csv_text(sorted(report.inputs) + [key], [[report.inputs[k] for k in sorted(report.inputs)] + [value]]), EXIT_OK
            return report.to_json(), EXIT_OK
        param, grid = _sweep_grid(sweep)
        reports = [_point_report(protocol, {**data, param: float(x)}) for x in grid]
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    key = "rate" if reports[0].rate is not None else "length"
    values = [r.rate if r.rate is not None else r.length for r in reports]
    if args.format == "json":
        rows = [{param: float(x), key: v} for x, v in zip(grid, values)]
        return dumps({"protocol": protocol, "fixed": data, "rows": rows}), EXIT_OK
    return _csv_text([param, key], [[repr(float(x)), repr(v)] for x, v in zip(grid, values)]), EXIT_OK


# ---------------------------------------------------------------------------
# pipeline


def cmd_pipeline(args: argparse.Namespace) -> tuple[str, int]:
    data = _load_config(args.config)
    unknown = set(data) - {"simulation", "keys", "pipeline", "transcript"}
    if unknown:
        raise CliError(f"unknown pipeline config keys {sorted(unknown)}")
    if ("simulation" in data) == ("keys" in data):
        raise CliError("pipeline config needs exactly one of simulation and keys")
    pconf = PipelineConfig.from_dict(data.get("pipeline", {}))
    seed = None
    if "keys" in data:
        try:
            key_a, key_b = bits_from_str(data["keys"]["alice"]), bits_from_str(data["keys"]["bob"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"keys need alice and bob bit strings: {exc}") from None
        if "transcript" in data:
            result = replay(key_a, key_b, data["transcript"])
        else:
            seed = _require_seed(args)
            result = process_keys(key_a, key_b, pconf, seed)
    else:
        if "transcript" in data:
            raise CliError("replay needs the raw keys, not a simulation")
        seed = _require_seed(args)
        sim = ProtocolConfig.from_dict({**data["simulation"], "seed": seed})
        result = run_pipeline(simulate(sim, workers=args.workers).records, pconf, seed)
    report = result.report.to_dict()
    transcript = report.pop("transcript", result.transcript)
    out = {"key_hex": result.key_hex, "key_length": None if result.key is None else len(result.key),
           "report": report, "transcript": transcript}
    if seed is not None:
        out["seed"] = seed
    return dumps(out), EXIT_ABORT if result.abort else EXIT_OK


# ---------------------------------------------------------------------------
# squash-check


def _matrix(entry: Any) -> np.ndarray:
    if isinstance(entry, dict):
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    return np.asarray(entry, dtype=complex)


def _matrix_json(m: np.ndarray) -> dict[str, list]:
    return {"re": np.real(m).tolist(), "im": np.imag(m).tolist()}


def _problem(data: dict[str, Any]) -> SquashProblem:
    if "preset" in data:
        return preset_problem(str(data["preset"]))
    try:
        target = Povm(tuple(_matrix(e) for e in data["target"]))
        full = Povm(tuple(_matrix(e) for e in data["full"]))
    except KeyError as exc:
        raise CliError(f"squash problem needs {exc.args[0]} or a preset") from None
    groups = data.get("groups")
    return SquashProblem(target, full, None if groups is None else tuple(tuple(g) for g in groups),
                         name=str(data.get("name", "custom")))


def cmd_squash_check(args: argparse.Namespace) -> tuple[str, int]:
    data = _load_config(args.config)
    try:
        problem = _problem(data)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    cert = check_feasibility(problem)
    out: dict[str, Any] = {"problem": problem.name, "certificate": cert.to_dict()}
    if cert.t is not None:
        out["certificate"]["t"] = _matrix_json(cert.t)
    code = EXIT_NUMERIC if cert.verdict == "undetermined" else EXIT_OK
    if data.get("noise_search") and cert.verdict != "undetermined":
        noise = noise_to_feasibility(problem)
        out["noise"] = {"lambda": noise.lam, "tol": noise.tol, "above": noise.above.verdict,
                        "below": None if noise.below is None else noise.below.verdict}
        if noise.below is not None and noise.below.verdict == "undetermined":
            code = EXIT_NUMERIC
    return dumps(out), code


# ---------------------------------------------------------------------------
# decoy


def cmd_decoy(args: argparse.Namespace) -> tuple[str, int]:
    data = _load_config(args.config)
    try:
        if "synthesize" in data:
            s = data["synthesize"]
            decoy = synthesize(s["intensities"], s["yields"], int(s.get("cutoff", len(s["yields"]) - 1)),
                               s.get("errors"))
        else:
            decoy = DecoyData.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad decoy config: {exc}") from None
    bounds = decoy_bounds(decoy)
    out = {"data": decoy.to_dict(), "bounds": bounds.to_dict()}
    return dumps(out), EXIT_OK if bounds.feasible else EXIT_ABORT


COMMANDS: dict[str, Callable[[argparse.Namespace], tuple[str, int]]] = {
    "simulate": cmd_simulate,
    "keyrate": cmd_keyrate,
    "pipeline": cmd_pipeline,
    "squash-check": cmd_squash_check,
    "decoy": cmd_decoy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkdlab", description="QKD simulation and key-rate toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--seed", type=_seed, metavar="U64", help="seed for stochastic commands")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        if name in ("simulate", "pipeline"):
            p.add_argument("--workers", type=int, default=None, help="threads for round simulation")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.format is None:
        args.format = "csv" if args.command == "keyrate" and _is_sweep(args.config) else "json"
    try:
        text, code = COMMANDS[args.command](args)
    except (CliError, ConfigError) as exc:
        print(f"qkdlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(text, newline="")
    else:
        sys.stdout.write(text)
    return code


def _is_sweep(path: str | None) -> bool:
    try:
        return "sweep" in json.loads(Path(path).read_text())
    except (TypeError, OSError, json.JSONDecodeError, AttributeError):
        return False


if __name__ == "__main__":
    sys.exit(main())
