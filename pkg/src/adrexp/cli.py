"""Command-line driver.

::

    adrexp list-models
    adrexp run --model schnakenberg2d --n 150 --steps 4000 --tfinal 2 --out runs/schnak
    adrexp convergence --model adv-brusselator3d --n 64 --steps 50,100,150,200 --ref-mult 8
    adrexp splitting-test --model schnakenberg2d --n 12 --taus 1e-3,5e-4,2.5e-4

Every option may also come from a JSON file given with ``--config``; keys are
the long option names with dashes or underscores. Command-line flags win.

Exit status: 0 success, 2 configuration error, 3 numerical blow-up, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import contextmanager
from importlib import metadata as importlib_metadata
from pathlib import Path
from typing import List, Optional, Sequence

from . import fileio
from .integrate import SCHEMES, BlowUpError, SimState, run_steps
from .models import MODELS, ModelError, SeededNoise, get_model, initial_condition, \
    without_reaction
from .studies import convergence_study, smooth_initial_condition, splitting_study
from .tensor import OracleSizeError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


# --- configuration ----------------------------------------------------------

def _int_list(text) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    if isinstance(text, int):
        return [text]
    return [int(x) for x in str(text).split(",") if x.strip()]


def _float_list(text) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(x) for x in str(text).split(",") if x.strip()]


_CONFIG_KEYS = ("model", "n", "steps", "tfinal", "scheme", "seed", "out", "snapshot_every",
                "ref_mult", "taus", "ic", "no_reaction")


def _load_config_file(path: str) -> dict:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    cfg = {}
    for key, val in raw.items():
        k = key.replace("-", "_")
        if k not in _CONFIG_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        cfg[k] = val
    return cfg


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge the JSON config file (if any) with explicit flags; flags win."""
    cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if "model" not in cfg:
        raise ConfigError("--model is required")
    try:
        model = get_model(cfg["model"])
    except ModelError as exc:
        raise ConfigError(str(exc)) from None
    cfg["model"] = model
    cfg["n"] = int(cfg.get("n", model.setup["n"]))
    if cfg["n"] < 3:
        raise ConfigError(f"--n must be at least 3, got {cfg['n']}")
    scheme = cfg.get("scheme", "etd2rkds")
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    cfg["scheme"] = scheme
    if cfg.get("seed") is not None:
        cfg["seed"] = int(cfg["seed"])
    return cfg


# --- threads ----------------------------------------------------------------

@contextmanager
def thread_limit():
    """Honor ``ADR_THREADS`` (0 or unset: library default)."""
    raw = os.environ.get("ADR_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ADR_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("ADR_THREADS must be >= 0")
    if n == 0:
        yield
        return
    from threadpoolctl import threadpool_limits
    with threadpool_limits(limits=n):
        yield


# --- commands ---------------------------------------------------------------

def _package_version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def _model_for(cfg):
    return without_reaction(cfg["model"]) if cfg.get("no_reaction") else cfg["model"]


def cmd_run(cfg: dict) -> int:
    model = _model_for(cfg)
    steps = cfg.get("steps", model.setup["pattern_steps"])
    steps = _int_list(steps)
    if len(steps) != 1:
        raise ConfigError("run takes a single step count")
    steps = steps[0]
    if steps < 1:
        raise ConfigError(f"--steps must be >= 1, got {steps}")
    tfinal = float(cfg.get("tfinal", model.setup["pattern_tfinal"]))
    if not tfinal > 0:
        raise ConfigError("--tfinal must be positive")
    every = int(cfg.get("snapshot_every", 0) or 0)
    if every < 0:
        raise ConfigError("--snapshot-every must be >= 0")
    out = Path(cfg.get("out", "."))
    grid = model.grid(cfg["n"])
    out.mkdir(parents=True, exist_ok=True)

    def snapshot(state: SimState):
        fileio.write_snapshot(out / fileio.snapshot_name("u", state.n), state.U)
        fileio.write_snapshot(out / fileio.snapshot_name("v", state.n), state.V)

    observers = []
    if every:
        observers.append(lambda s: snapshot(s) if s.n % every == 0 else None)
    timing = {}
    wall0 = time.perf_counter()
    final, ind = run_steps(model, grid, cfg["scheme"], tfinal, steps, observers,
                           seed=cfg.get("seed"), timing=timing)
    wall = time.perf_counter() - wall0
    if not every or steps % every:
        snapshot(final)
    fileio.write_indicators(out / "indicators.csv", ind.t, ind.mean_u, ind.increment)
    seed = cfg.get("seed")
    if seed is None and model.ic_kind != "deterministic":
        seed = model.seed
    meta = {
        "model": model.name,
        "scheme": cfg["scheme"],
        "tau": tfinal / steps,
        "steps": steps,
        "tfinal": tfinal,
        "seed": seed,
        "grid": {"intervals": [list(iv) for iv in grid.intervals],
                 "points": list(grid.points)},
        "snapshot_every": every,
        "wall_clock_seconds": wall,
        "setup_seconds": timing["setup_seconds"],
        "mean_step_seconds": timing["step_seconds"] / steps,
        "format_versions": {"snapshot": fileio.SNAPSHOT_VERSION,
                            "indicators": fileio.INDICATORS_VERSION},
        "package_version": _package_version(),
    }
    fileio.write_metadata(out / "metadata.json", meta)
    print(f"{model.name}: {steps} {cfg['scheme']} steps to t={tfinal:g} in {wall:.2f} s; "
          f"output in {out}")
    return EXIT_OK


def cmd_convergence(cfg: dict) -> int:
    model = _model_for(cfg)
    steps = _int_list(cfg.get("steps", model.setup["steps"]))
    if len(steps) < 2:
        raise ConfigError("a convergence study needs at least two step counts")
    if any(s < 1 for s in steps) or sorted(set(steps)) != steps:
        raise ConfigError("step counts must be positive and strictly increasing")
    tfinal = float(cfg.get("tfinal", model.setup["tfinal"]))
    ref_mult = int(cfg.get("ref_mult", 4))
    if ref_mult < 1:
        raise ConfigError("--ref-mult must be >= 1")
    grid = model.grid(cfg["n"])
    rows = convergence_study(model, grid, cfg["scheme"], tfinal, steps, ref_mult=ref_mult,
                             seed=cfg.get("seed"))
    if cfg.get("out"):
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_convergence(out / "convergence.csv", rows)
    fileio.write_convergence(sys.stdout, rows)
    errs = [r.error for r in rows]
    if any(b >= a for a, b in zip(errs, errs[1:])):
        print("warning: errors do not decrease monotonically; "
              "step sizes may lie outside the asymptotic regime", file=sys.stderr)
    return EXIT_OK


def cmd_splitting_test(cfg: dict) -> int:
    model = _model_for(cfg)
    taus = _float_list(cfg.get("taus", [1e-3, 5e-4, 2.5e-4]))
    if len(taus) < 2 or any(t <= 0 for t in taus):
        raise ConfigError("--taus needs at least two positive step sizes")
    grid = model.grid(cfg["n"])
    ic = cfg.get("ic", "smooth")
    if ic == "smooth":
        initial = smooth_initial_condition(cfg["model"], grid)
    elif ic == "model":
        noise = None if cfg.get("seed") is None else \
            SeededNoise(cfg["seed"], model.ic_amplitude)
        initial = initial_condition(cfg["model"], grid, noise)
    else:
        raise ConfigError(f"--ic must be 'smooth' or 'model', got {ic!r}")
    rows, slope = splitting_study(model, grid, taus, initial=initial)
    print("tau,defect,local_slope,asymptotic")
    for r in rows:
        loc = "" if r.local_slope is None else f"{r.local_slope:.4f}"
        print(f"{r.tau:.6g},{r.defect:.6e},{loc},{'yes' if r.asymptotic else 'no'}")
    print(f"# fitted slope: {slope:.4f}")
    return EXIT_OK


def cmd_list_models(cfg: Optional[dict] = None) -> int:
    print(f"{'name':<20} {'d':>1}  {'domain':<14} description / parameters")
    for m in MODELS.values():
        a, b = m.interval
        dom = f"[{a:g},{b:.4g}]^{m.d}"
        params = ", ".join(f"{k}={v:g}" for k, v in m.params.items())
        coeff = (f"delta_u={m.recipe_u.delta:g}, delta_v={m.recipe_v.delta:g}, "
                 f"alpha={m.recipe_u.alpha:g}")
        print(f"{m.name:<20} {m.d:>1}  {dom:<14} {m.description}; {coeff}; {params}")
    return EXIT_OK


# --- entry point ------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adrexp", description="Exponential integrators for ADR systems")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, steps_help):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--model", help="registered model name (see list-models)")
        p.add_argument("--n", type=int, help="grid points per axis")
        p.add_argument("--steps", help=steps_help)
        p.add_argument("--tfinal", type=float, help="final time")
        p.add_argument("--scheme", choices=SCHEMES)
        p.add_argument("--seed", type=int, help="noise seed for random initial data")
        p.add_argument("--out", help="output directory")
        p.add_argument("--no-reaction", dest="no_reaction", action="store_true",
                       default=None, help="drop the reaction terms")

    p = sub.add_parser("run", help="integrate one model and write snapshots")
    common(p, "number of time steps")
    p.add_argument("--snapshot-every", dest="snapshot_every", type=int,
                   help="also write snapshots every k steps")

    p = sub.add_parser("convergence", help="errors and observed orders for a step sequence")
    common(p, "comma-separated step counts")
    p.add_argument("--ref-mult", dest="ref_mult", type=int,
                   help="reference uses this multiple of the largest step count")

    p = sub.add_parser("splitting-test", help="one-step defect against the dense oracle")
    common(p, argparse.SUPPRESS)
    p.add_argument("--taus", help="comma-separated step sizes")
    p.add_argument("--ic", choices=("smooth", "model"),
                   help="smooth cosine perturbation (default) or the model's initial data")

    sub.add_parser("list-models", help="print the model catalog")
    return parser


_COMMANDS = {
    "run": cmd_run,
    "convergence": cmd_convergence,
    "splitting-test": cmd_splitting_test,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with thread_limit():
            if args.command == "list-models":
                return cmd_list_models()
            return _COMMANDS[args.command](resolve_config(args))
    except BlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ModelError, OracleSizeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
