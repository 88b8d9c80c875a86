"""Command-line driver writing CSV trajectories and text reports.

Config files are line-oriented ``key = value`` text with ``#`` comments::

    preset = fig2
    delta_tau_list = 0, 60
    steps = 12000

Command-line flags override the file.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    DEFAULT_RECORD_EVERY,
    DEFAULT_STEPS,
    WINDOW_MARGIN,
    IntegrationError,
    TimeGrid,
    evolve,
)
from .entropy import ghz_report, ssi_parameter
from .model import FIG2_PARAMS, ModelParams, dark_state

logger = logging.getLogger("cavity_ssi")

PRESETS = ("fig2", "fig3", "ghz", "custom")
PRESET_DETUNINGS = {"fig2": (0.0, 60.0), "fig3": (0.0,), "custom": (0.0,), "ghz": ()}

TRAJECTORY_COLUMNS = ("s", "E", "S_A", "S_AB", "S_An", "S_ABn", "Ic_AB", "dark_overlap", "pop_1", "pop_6")
DARKSTATE_COLUMNS = ("s", "alpha_over_P", "beta_over_P", "gamma_over_P", "delta_over_P")

_INT_KEYS = {"n", "mu", "steps", "record_every"}
_FLOAT_KEYS = {"g10_tau", "g20_tau", "T_over_tau", "s_start", "s_end"}
CONFIG_KEYS = {"preset", "delta_tau_list", "output_dir"} | _INT_KEYS | _FLOAT_KEYS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "fig2"
    params: ModelParams = FIG2_PARAMS
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(-WINDOW_MARGIN, FIG2_PARAMS.T_over_tau + WINDOW_MARGIN))
    output_dir: Path = Path("out")
    detuning_list: tuple[float, ...] = PRESET_DETUNINGS["fig2"]


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"{text!r} is not an integer") from None
        return int(value)


def _parse_detunings(text: str) -> tuple[float, ...]:
    items = [item.strip() for item in text.split(",")]
    if not items or any(not item for item in items):
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")
    return tuple(_parse_float(item) for item in items)


def _read_pairs(text: str) -> dict[str, tuple[int, str]]:
    pairs: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; allowed: {', '.join(sorted(CONFIG_KEYS))}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {pairs[key][0]})")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        pairs[key] = (lineno, value)
    return pairs


def build_config(values: dict[str, object], lines: dict[str, int] | None = None) -> ExperimentConfig:
    """Assemble a validated config from typed values; missing keys take preset defaults."""
    lines = lines or {}

    def where(*keys):
        nums = sorted(lines[k] for k in keys if k in lines)
        return f"line {nums[0]}: " if nums else ""

    preset = values.get("preset", "fig2")
    if preset not in PRESETS:
        raise ConfigError(f"{where('preset')}unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    param_keys = ("n", "mu", "g10_tau", "g20_tau", "T_over_tau")
    try:
        params = replace(FIG2_PARAMS, **{k: values[k] for k in param_keys if k in values})
    except ValueError as exc:
        raise ConfigError(f"{where(*param_keys)}{exc}") from None
    s_start = values.get("s_start", -WINDOW_MARGIN)
    s_end = values.get("s_end", params.T_over_tau + WINDOW_MARGIN)
    grid_keys = ("s_start", "s_end", "steps", "record_every")
    try:
        grid = TimeGrid(s_start, s_end, values.get("steps", DEFAULT_STEPS),
                        values.get("record_every", DEFAULT_RECORD_EVERY))
    except ValueError as exc:
        raise ConfigError(f"{where(*grid_keys)}{exc}") from None
    detunings = tuple(values.get("delta_tau_list", PRESET_DETUNINGS[preset]))
    if preset != "ghz" and not detunings:
        raise ConfigError("delta_tau_list is empty")
    if len(set(detunings)) != len(detunings):
        raise ConfigError(f"{where('delta_tau_list')}repeated detuning in {list(detunings)}")
    out = Path(values.get("output_dir", "out"))
    return ExperimentConfig(preset, params, grid, out, detunings)


def _typed_values(text: str) -> tuple[dict[str, object], dict[str, int]]:
    pairs = _read_pairs(text)
    values: dict[str, object] = {}
    for key, (lineno, raw) in pairs.items():
        try:
            if key in _INT_KEYS:
                values[key] = _parse_int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = _parse_float(raw)
            elif key == "delta_tau_list":
                values[key] = _parse_detunings(raw)
            else:
                values[key] = raw
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return values, {k: v[0] for k, v in pairs.items()}


def parse_config(text: str) -> ExperimentConfig:
    return build_config(*_typed_values(text))


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.9e}"


def _tag(delta_tau: float) -> str:
    return f"{delta_tau:g}"


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def run_detuning(config: ExperimentConfig, delta_tau: float) -> dict[str, float]:
    params = replace(config.params, delta_tau=delta_tau)
    frames = evolve(params, config.grid)
    traj_rows, dark_rows, reports = [], [], []
    for frame in frames:
        pops = frame.state.populations()
        if not np.all(np.isfinite(pops)):
            raise IntegrationError(f"non-finite amplitudes at s={frame.s}")
        rep = ssi_parameter(frame)
        reports.append(rep)
        traj_rows.append((frame.s, rep.E, rep.S_A, rep.S_AB, rep.S_An, rep.S_ABn, rep.Ic_AB,
                          frame.dark_overlap, pops[0], pops[5]))
        dark = dark_state(frame.g1_tau, frame.g2_tau, params)
        coeffs = dark.coefficients if dark.defined else [None] * 4
        dark_rows.append((frame.s, *coeffs))
    tag = _tag(delta_tau)
    _write_csv(config.output_dir / f"trajectory_{tag}.csv", TRAJECTORY_COLUMNS, traj_rows)
    _write_csv(config.output_dir / f"darkstate_{tag}.csv", DARKSTATE_COLUMNS, dark_rows)
    final, last = reports[-1], frames[-1]
    overlaps = [f.dark_overlap for f in frames if f.dark_overlap is not None]
    return {
        "delta_tau": delta_tau,
        "s_final": last.s,
        "E_final": final.E,
        "E_min": min(r.E for r in reports),
        "E_max": max(r.E for r in reports),
        "S_A_final": final.S_A,
        "S_AB_final": final.S_AB,
        "S_An_final": final.S_An,
        "S_ABn_final": final.S_ABn,
        "Ic_AB_final": final.Ic_AB,
        "pop_1_final": float(last.state.populations()[0]),
        "pop_6_final": float(last.state.populations()[5]),
        "dark_overlap_min": min(overlaps) if overlaps else float("nan"),
        "norm_drift_max": max(abs(f.state.norm - 1.0) for f in frames),
        "ssi_violations": sum(not r.ssi_ok for r in reports),
        "frames": len(frames),
    }


def _summary_text(config: ExperimentConfig, results: list[dict]) -> str:
    p, g = config.params, config.grid
    lines = [
        f"# cavity_ssi {__version__} preset={config.preset}",
        f"# n={p.n} mu={p.mu} g10_tau={p.g10_tau:g} g20_tau={p.g20_tau:g} T_over_tau={p.T_over_tau:.10g}",
        f"# s_start={g.s_start:.10g} s_end={g.s_end:.10g} steps={g.steps} record_every={g.record_every}",
    ]
    for res in results:
        lines.append(f"[delta_tau={_tag(res['delta_tau'])}]")
        for key, value in res.items():
            if key == "delta_tau":
                continue
            lines.append(f"{key}={value}" if isinstance(value, int) else f"{key}={_fmt(value)}")
    return "\n".join(lines) + "\n"


def _four(x: float) -> str:
    return f"{round(x, 4) + 0.0:.4f}"


def ghz_text() -> str:
    rep = ghz_report()
    return "\n".join([
        "# four-qubit GHZ state, qubit D discarded",
        f"S_ABC={_four(rep.S_ABC)}",
        f"S_A={_four(rep.S_A)}",
        f"S_AB={_four(rep.S_AB)}",
        f"S_BC={_four(rep.S_BC)}",
        f"E={_four(rep.E)}",
        f"equality_residual={rep.residual:.3e}",
        f"supports_compatible={rep.supports_compatible}",
    ]) + "\n"


def run(config: ExperimentConfig) -> int:
    """Execute ``config``, writing files under ``config.output_dir``; returns an exit status."""
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
        if config.preset == "ghz":
            text = ghz_text()
            (config.output_dir / "ghz_report.txt").write_text(text, encoding="utf-8")
            sys.stdout.write(text)
            return 0
        results = []
        for delta_tau in config.detuning_list:
            logger.info("running delta_tau=%g", delta_tau)
            results.append(run_detuning(config, delta_tau))
        text = _summary_text(config, results)
        (config.output_dir / "summary.txt").write_text(text, encoding="utf-8")
        sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1
    except (IntegrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-ssi",
        description="Simulate two-atom two-mode cavity STIRAP and track entropies and the SSI gap E.",
        epilog=(
            "Defaults: preset fig2 (n=2, mu=0, g10_tau=g20_tau=15, T_over_tau=4/3, "
            "delta_tau_list=0,60), window s in [-3, T_over_tau+3], "
            f"steps={DEFAULT_STEPS}, record_every={DEFAULT_RECORD_EVERY}, output_dir=out. "
            f"Config keys: {', '.join(sorted(CONFIG_KEYS))}."
        ),
    )
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--preset", choices=PRESETS, help="fig2, fig3, ghz or custom")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--steps", type=int, help="number of RK4 steps")
    parser.add_argument("--delta-tau", help="comma-separated detunings, e.g. 0,60")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        values, lines = _typed_values(text)
        if args.preset:
            values["preset"] = args.preset
        if args.out:
            values["output_dir"] = args.out
        if args.steps is not None:
            values["steps"] = args.steps
        if args.delta_tau:
            try:
                values["delta_tau_list"] = _parse_detunings(args.delta_tau)
            except ValueError as exc:
                raise ConfigError(f"--delta-tau: {exc}") from None
        config = build_config(values, lines)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)
