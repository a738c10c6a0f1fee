"""Batch command line: ``enhance``, ``tune``, ``eval`` and ``compare``.

Exit status is 0 on success, 1 for usage or configuration problems and 2
for unreadable/unwritable files. Settings come from flags, then an optional
``--config`` file of ``key=value`` lines, then built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .baselines import histogram_equalize
from .image_io import ImageFormatError, RgbImage, load_image, resize_bilinear, save_image
from .objective import FitnessReport, fitness
from .pso import ParamBounds, SwarmConfig, TuneResult, default_bounds, tune
from .retinex import MSRCR_DEFAULTS, MSRMCR_DEFAULTS, PARAM_TYPES, enhance
from .wavelet import WEComparison, we_report

log = logging.getLogger("retinex_pso")

METHODS = ("he", "msrcr", "msrmcr")
TUNE_SIZE = 256
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

PARAM_ALIASES = {"C": "c_strength", "G": "gain", "b": "offset", "s1": "sigma1", "s2": "sigma2", "s3": "sigma3"}
TABLE_COLUMNS = {
    "msrmcr": ["Image", "Resolution", "sigma1", "sigma2", "sigma3", "C", "G", "b"],
    "msrcr": ["Image", "Resolution", "sigma1", "sigma2", "sigma3", "G", "alpha", "beta", "b"],
}
_TABLE_FIELDS = {
    "msrmcr": ["sigma1", "sigma2", "sigma3", "c_strength", "gain", "offset"],
    "msrcr": ["sigma1", "sigma2", "sigma3", "gain", "alpha", "beta", "offset"],
}
EVAL_COLUMNS = ["original", "enhanced", *WEComparison.__dataclass_fields__, *FitnessReport.__dataclass_fields__]
COMPARE_COLUMNS = ["image", "method", *FitnessReport.__dataclass_fields__, *WEComparison.__dataclass_fields__]


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    out: Optional[str] = None
    method: str = "msrmcr"
    params: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    iterations: int = 30
    particles: int = 30
    threshold: Optional[float] = None
    resize: bool = True
    report: str = "json"
    jobs: int = 1

    def swarm_config(self) -> SwarmConfig:
        try:
            return SwarmConfig(particle_count=self.particles, max_iterations=self.iterations,
                               rng_seed=self.seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_params(text: str) -> dict[str, float]:
    """``"C=110,G=2.5"`` -> ``{"c_strength": 110.0, "gain": 2.5}``."""
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"parameter override {item!r} is not key=value")
        key = PARAM_ALIASES.get(key.strip(), key.strip())
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"parameter {key!r} has non-numeric value {value!r}") from None
    return out


def read_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _fixed_params(method: str, overrides: dict[str, float]):
    base = {"msrmcr": MSRMCR_DEFAULTS, "msrcr": MSRCR_DEFAULTS}[method]
    unknown = set(overrides) - set(base.names)
    if unknown:
        raise ConfigError(f"unknown {method} parameters: {sorted(unknown)}")
    values = {n: overrides.get(n, getattr(base, n)) for n in base.names}
    try:
        return PARAM_TYPES[method](**values)
    except ValueError as exc:
        raise ConfigError(f"invalid {method} parameters: {exc}") from exc


def _pinned_bounds(method: str, overrides: dict[str, float]) -> ParamBounds:
    bounds = default_bounds(method)
    unknown = set(overrides) - set(bounds.names)
    if unknown:
        raise ConfigError(f"unknown {method} parameters: {sorted(unknown)}")
    for name, value in overrides.items():
        i = bounds.names.index(name)
        if not bounds.lower[i] <= value <= bounds.upper[i]:
            raise ConfigError(
                f"{name}={value} outside tuning range [{bounds.lower[i]}, {bounds.upper[i]}]")
    return bounds.with_overrides(**{n: (v, v) for n, v in overrides.items()})


def _write_atomic(path: Path, writer) -> None:
    """Write via a temp file in the same directory and rename into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_text(path: Path, text: str) -> None:
    def w(tmp):
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
    _write_atomic(path, w)


def _write_image(path: Path, img: RgbImage) -> None:
    _write_atomic(path, lambda tmp: save_image(img, tmp))


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in columns})
    return buf.getvalue()


def _load_inputs(cfg: RunConfig) -> list[tuple[str, RgbImage]]:
    images = []
    for path in cfg.inputs:
        img = load_image(path)
        if cfg.resize:
            img = resize_bilinear(img, TUNE_SIZE, TUNE_SIZE)
        images.append((path, img))
    return images


def _out_dir(cfg: RunConfig) -> Path:
    if not cfg.out:
        raise ConfigError(f"{cfg.command} needs --out DIR")
    return Path(cfg.out)


def _apply(method: str, img: RgbImage, params):
    return histogram_equalize(img) if method == "he" else enhance(img, params)


def _executor(cfg: RunConfig):
    return ThreadPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 else None


def cmd_enhance(cfg: RunConfig) -> int:
    params = None if cfg.method == "he" else _fixed_params(cfg.method, cfg.params)
    if cfg.method == "he" and cfg.params:
        raise ConfigError("he takes no parameters")
    out = _out_dir(cfg)
    for path, img in _load_inputs(cfg):
        enhanced = _apply(cfg.method, img, params)
        report = fitness(enhanced, cfg.threshold)
        stem = f"{Path(path).stem}_{cfg.method}"
        sidecar = {
            "image": Path(path).name,
            "method": cfg.method,
            "params": None if params is None else params.to_dict(),
            "width": img.width,
            "height": img.height,
            "fitness": report.to_dict(),
        }
        _write_image(out / f"{stem}.png", enhanced)
        _write_text(out / f"{stem}.json", json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
        log.info("%s -> %s (fitness %.4f)", path, out / f"{stem}.png", report.fitness)
    return EXIT_OK


def _tune_one(cfg: RunConfig, method: str, img: RgbImage, bounds: ParamBounds) -> TuneResult:
    pool = _executor(cfg)
    try:
        return tune(img, method, bounds, cfg.swarm_config(), threshold=cfg.threshold,
                    evaluator=None if pool is None else pool.map)
    finally:
        if pool is not None:
            pool.shutdown()


def table_row(image_name: str, img: RgbImage, result: TuneResult) -> dict:
    """One row shaped like the published tuned-parameter tables."""
    variant = result.best_params.variant
    values = [getattr(result.best_params, f) for f in _TABLE_FIELDS[variant]]
    row = {"Image": image_name, "Resolution": f"{img.width}x{img.height}"}
    row.update({col: f"{v:.2f}" for col, v in zip(TABLE_COLUMNS[variant][2:], values)})
    return row


def cmd_tune(cfg: RunConfig) -> int:
    if cfg.method not in ("msrcr", "msrmcr"):
        raise ConfigError(f"tune supports msrcr and msrmcr, not {cfg.method!r}")
    bounds = _pinned_bounds(cfg.method, cfg.params)
    cfg.swarm_config()
    out = _out_dir(cfg)
    rows = []
    for path, img in _load_inputs(cfg):
        result = _tune_one(cfg, cfg.method, img, bounds)
        stem = f"{Path(path).stem}_{cfg.method}"
        _write_image(out / f"{stem}.png", enhance(img, result.best_params))
        _write_text(out / f"{stem}_tune.json", result.to_json() + "\n")
        rows.append(table_row(Path(path).stem, img, result))
        log.info("%s tuned: fitness %.4f", path, result.best_fitness)
    _write_text(out / f"tuned_{cfg.method}.csv", _csv_text(TABLE_COLUMNS[cfg.method], rows))
    return EXIT_OK


def _emit(cfg: RunConfig, name: str, payload, columns, rows) -> None:
    text = (json.dumps(payload, indent=2, sort_keys=True) + "\n" if cfg.report == "json"
            else _csv_text(columns, rows))
    if cfg.out:
        _write_text(Path(cfg.out) / f"{name}.{cfg.report}", text)
    else:
        sys.stdout.write(text)


def cmd_eval(cfg: RunConfig) -> int:
    if len(cfg.inputs) < 2 or len(cfg.inputs) % 2:
        raise ConfigError("eval takes ORIGINAL ENHANCED path pairs")
    images = _load_inputs(cfg)
    records, rows = [], []
    for (p0, original), (p1, enhanced) in zip(images[0::2], images[1::2]):
        try:
            we = we_report(original, enhanced)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        fit = fitness(enhanced, cfg.threshold)
        records.append({"original": p0, "enhanced": p1, "wavelet_energy": we.to_dict(),
                        "fitness": fit.to_dict()})
        rows.append({"original": p0, "enhanced": p1, **we.to_dict(), **fit.to_dict()})
    _emit(cfg, "eval", records, EVAL_COLUMNS, rows)
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    cfg.swarm_config()
    if cfg.params:
        raise ConfigError("compare tunes every method; --params is not accepted")
    out = _out_dir(cfg)
    records, rows = [], []
    for path, img in _load_inputs(cfg):
        stem = Path(path).stem
        for method in METHODS:
            params = None
            if method != "he":
                params = _tune_one(cfg, method, img, default_bounds(method)).best_params
            enhanced = _apply(method, img, params)
            fit = fitness(enhanced, cfg.threshold)
            we = we_report(img, enhanced)
            _write_image(out / f"{stem}_{method}.png", enhanced)
            records.append({"image": stem, "method": method,
                            "params": None if params is None else params.to_dict(),
                            "fitness": fit.to_dict(), "wavelet_energy": we.to_dict()})
            rows.append({"image": stem, "method": method, **fit.to_dict(), **we.to_dict()})
    _write_text(out / "compare.csv", _csv_text(COMPARE_COLUMNS, rows))
    _write_text(out / "compare.json", json.dumps(records, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {"enhance": cmd_enhance, "tune": cmd_tune, "eval": cmd_eval, "compare": cmd_compare}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    # accepted before or after the verb; SUPPRESS keeps the subparser from resetting it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    parser = _Parser(prog="retinex-pso", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        p.add_argument("inputs", nargs="+", metavar="IMAGE")
        # None means "not given" so config-file values can fill in
        p.add_argument("--method", choices=METHODS, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--iterations", type=int, default=None)
        p.add_argument("--particles", type=int, default=None)
        p.add_argument("--threshold", type=float, default=None, help="absolute edgel threshold")
        p.add_argument("--no-resize", dest="resize", action="store_false", default=None)
        p.add_argument("--report", choices=("json", "csv"), default=None)
        p.add_argument("--params", default=None, help="overrides, e.g. C=110,G=2.5")
        p.add_argument("--jobs", type=int, default=None, help="parallel fitness evaluations")
        p.add_argument("--config", default=None, help="key=value settings file")
    return parser


_CONVERTERS = {
    "method": str, "out": str, "seed": int, "iterations": int, "particles": int,
    "threshold": float, "report": str, "jobs": int,
    "resize": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def make_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, inputs=list(ns.inputs))
    layers = []
    if ns.config:
        layers.append(read_config_file(ns.config))
    layers.append({k: getattr(ns, k) for k in (*_CONVERTERS, "params") if getattr(ns, k) is not None})
    for layer in layers:
        for key, value in layer.items():
            if key == "params":
                cfg = replace(cfg, params={**cfg.params, **(parse_params(value) if isinstance(value, str) else value)})
            elif key in _CONVERTERS:
                try:
                    value = _CONVERTERS[key](value) if isinstance(value, str) else value
                except ValueError:
                    raise ConfigError(f"bad value for {key}: {value!r}") from None
                cfg = replace(cfg, **{key: value})
            else:
                raise ConfigError(f"unknown config key {key!r}")
    if cfg.method not in METHODS:
        raise ConfigError(f"unknown method {cfg.method!r}; choose from {', '.join(METHODS)}")
    if cfg.report not in ("json", "csv"):
        raise ConfigError(f"unknown report format {cfg.report!r}")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    return cfg


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = make_config(ns)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"retinex-pso: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ImageFormatError) as exc:
        print(f"retinex-pso: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
