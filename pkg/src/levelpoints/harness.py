"""Experiment orchestration: discrepancy sweeps, window-ratio tables, weight trends.

A run is described by a flat ``key = value`` config file (see README).  The JSON
report is a pure function of the config: no timings or paths inside it, so the
same config and seed give byte-identical output for any thread count.  Wall
times go to the ``timings.csv`` side file instead.
"""

import hashlib
import json
import logging
import math
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from statistics import median

import numpy as np
from scipy.stats import spearmanr

from .arith import ceil_scaled
from .enumeration import (
    DEFAULT_BUDGET,
    GENERATOR_VERSION,
    PointSet,
    Window,
    enumerate_points,
    parse_header,
)
from .errors import BudgetExceededError
from .lattice import hecke_degree
from .measure import estimate_measure
from .orbits import is_fundamental_discriminant
from .varieties import DET, PolynomialFamily

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EXPERIMENTS = ("equidist", "ratio", "omega")
_RATIO_STREAM = 1 << 32


# -- config -----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    family: PolynomialFamily
    levels: tuple
    window: Window
    window2: Window = None
    level_filter: str = "none"
    grid_axes: tuple = (0, 1)
    grid_splits: tuple = (2, 4)
    epsilon: float = 0.01
    samples: int = 10**6
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    cache_dir: str = None
    threads: int = 1
    experiments: tuple = ("equidist",)
    ratio_target: float = None

    def __post_init__(self):
        levels = sorted(set(int(m) for m in self.levels))
        if self.level_filter == "fundamental":
            levels = [m for m in levels if is_fundamental_discriminant(m)]
        elif self.level_filter != "none":
            raise ValueError(f"unknown level_filter {self.level_filter!r}")
        if not levels or levels[0] < 1:
            raise ValueError("levels must be a nonempty set of integers >= 1")
        object.__setattr__(self, "levels", tuple(levels))
        if self.window.dim != self.family.N:
            raise ValueError(f"window has {self.window.dim} axes, family needs {self.family.N}")
        if len(self.grid_axes) != len(self.grid_splits):
            raise ValueError("grid_axes and grid_splits differ in length")
        if len(set(self.grid_axes)) != len(self.grid_axes) or any(
            not 0 <= a < self.family.N for a in self.grid_axes
        ):
            raise ValueError("grid_axes must be distinct coordinate indices")
        if any(k < 1 for k in self.grid_splits):
            raise ValueError("grid_splits must be >= 1")
        for name in self.experiments:
            if name not in EXPERIMENTS:
                raise ValueError(f"unknown experiment {name!r}")
        if "ratio" in self.experiments and self.window2 is None:
            raise ValueError("the ratio experiment needs window2")
        if "omega" in self.experiments and self.family.kind != DET:
            raise ValueError("the omega trend is only defined for the determinant family")

    def describe(self):
        """Canonical JSON-able echo of the settings that determine the report."""
        return {
            "family": self.family.key(),
            "levels": list(self.levels),
            "level_filter": self.level_filter,
            "window": self.window.to_text().splitlines(),
            "window2": self.window2.to_text().splitlines() if self.window2 else None,
            "grid_axes": list(self.grid_axes),
            "grid_splits": list(self.grid_splits),
            "epsilon": self.epsilon,
            "samples": self.samples,
            "seed": self.seed,
            "budget": self.budget,
            "experiments": list(self.experiments),
            "ratio_target": self.ratio_target,
            "generator_version": GENERATOR_VERSION,
        }


def _ints(text):
    return [int(t) for t in text.replace(",", " ").split()]


def parse_levels(text):
    """``a:b:step`` (inclusive of b when hit), ``a:b`` or an explicit list."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(start, stop + 1, step))
    return _ints(text)


def _inline_window(text):
    rows = [r.split() for r in text.split(";") if r.strip()]
    return Window([(lo, hi) for lo, hi in rows])


def _window_from(opts, prefix, N, base):
    if f"{prefix}_file" in opts:
        return Window.read(base / opts[f"{prefix}_file"])
    if f"{prefix}_radius" in opts:
        return Window.cube(N, opts[f"{prefix}_radius"])
    if prefix in opts:
        return _inline_window(opts[prefix])
    return None


def family_from_options(opts, base=Path(".")):
    kind = opts["family"].strip()
    if kind == "quad":
        r, s = _ints(opts["signature"])
        if "qcoeffs_file" in opts:
            coeffs = _ints((base / opts["qcoeffs_file"]).read_text())
        else:
            coeffs = _ints(opts["qcoeffs"])
        return PolynomialFamily.quadratic(r, s, coeffs)
    return PolynomialFamily(kind, n=int(opts["n"]))


def parse_config_text(text, base=Path(".")):
    opts = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected key = value")
        opts[key.strip()] = value.strip()
    family = family_from_options(opts, base)
    window = _window_from(opts, "window", family.N, base)
    if window is None:
        raise ValueError("config needs window, window_file or window_radius")
    kw = dict(
        family=family,
        levels=parse_levels(opts["levels"]),
        window=window,
        window2=_window_from(opts, "window2", family.N, base),
        level_filter=opts.get("level_filter", "none"),
        grid_axes=tuple(_ints(opts.get("grid_axes", "0,1"))),
        grid_splits=tuple(_ints(opts.get("grid_splits", "2,4"))),
        epsilon=float(opts.get("epsilon", 0.01)),
        samples=int(float(opts.get("samples", 10**6))),
        seed=int(opts.get("seed", 0)),
        budget=int(float(opts.get("budget", DEFAULT_BUDGET))),
        cache_dir=opts.get("cache_dir"),
        threads=int(opts.get("threads", 1)),
        experiments=tuple(e.strip() for e in opts.get("experiments", "equidist").split(",") if e.strip()),
        ratio_target=float(opts["ratio_target"]) if "ratio_target" in opts else None,
    )
    if kw["cache_dir"] and not os.path.isabs(kw["cache_dir"]):
        kw["cache_dir"] = str(base / kw["cache_dir"])
    return ExperimentConfig(**kw)


def load_config(path):
    path = Path(path)
    return parse_config_text(path.read_text(), base=path.parent)


# -- cache ------------------------------------------------------------------


class PointCache:
    """On-disk point sets keyed by (family, m, window hash, generator version)."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, family, m, window):
        fam = hashlib.sha256(family.key().encode()).hexdigest()[:12]
        return self.dir / f"{fam}_m{m}_{window.hash()}.csv"

    def get(self, family, m, window):
        path = self.path(family, m, window)
        if not path.exists():
            return None
        try:
            text = path.read_text()
            lines = text.splitlines()
            head = parse_header(lines[0])
            version, _, note = head["version"].partition("+")
            if (
                head["family"] != family.key()
                or int(head["m"]) != m
                or head["window-hash"] != window.hash()
                or version != GENERATOR_VERSION
            ):
                return None
            pts = tuple(tuple(int(v) for v in line.split(",")) for line in lines[1:] if line)
            if any(len(p) != family.N for p in pts) or list(pts) != sorted(set(pts)):
                raise ValueError("malformed point rows")
        except (OSError, ValueError, IndexError, KeyError) as exc:
            log.warning("ignoring corrupt cache file %s: %s", path, exc)
            return None
        return PointSet(family, m, window, pts, version, note)

    def put(self, ps):
        path = self.path(ps.family, ps.m, ps.window)
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=".tmp-", suffix=".csv")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(ps.to_csv())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


class _Points:
    """Per-run memo of level summaries, backed by the optional on-disk cache.

    Only the point total and the grid cell counts are kept in memory, so long
    sweeps do not hold every point set at once.
    """

    def __init__(self, config):
        self.config = config
        self.cache = PointCache(config.cache_dir) if config.cache_dir else None
        self.memo = {}
        self.timings = {}
        self._lock = threading.Lock()

    def _load(self, m, window):
        t0 = time.perf_counter()
        ps = self.cache.get(self.config.family, m, window) if self.cache else None
        if ps is None:
            ps = enumerate_points(self.config.family, m, window, budget=self.config.budget)
            if self.cache:
                self.cache.put(ps)
        self.timings[(m, window)] = time.perf_counter() - t0
        return ps

    def summary(self, m, window):
        """``(T, cell counts)`` for level m; cell counts use the configured grid on ``window``."""
        key = (m, window)
        with self._lock:
            hit = self.memo.get(key)
        if hit is not None:
            return hit
        ps = self._load(m, window)
        cfg = self.config
        ncells = int(np.prod(cfg.grid_splits))
        idx = cell_indices(ps.points, window, cfg.grid_axes, cfg.grid_splits, m, cfg.family.d)
        out = (len(ps), np.bincount(idx, minlength=ncells).tolist())
        with self._lock:
            self.memo[key] = out
        return out

    def count(self, m, window):
        return self.summary(m, window)[0]


# -- statistics -------------------------------------------------------------


def spearman(x, y):
    """Spearman rank correlation, or None when undefined."""
    if len(x) < 2 or len(set(x)) < 2 or len(set(y)) < 2:
        return None
    return float(spearmanr(x, y).statistic)


def discrepancy(counts, mus):
    """Total-variation distance between count shares and measure shares (None if either is empty)."""
    T = sum(counts)
    M = sum(mus)
    if T == 0 or M <= 0:
        return None
    return 0.5 * sum(abs(n / T - mu / M) for n, mu in zip(counts, mus))


def cell_indices(points, window, axes, splits, m, d):
    """Cell of each point in the ``window.split(axes, splits)`` grid.

    Points on an interior face go to the upper cell, so each point lands in
    exactly one cell.
    """
    if len(points) == 0:
        return np.zeros(0, dtype=np.int64)
    try:
        X = np.array(points, dtype=np.int64)
    except OverflowError:
        X = np.array(points, dtype=object)
    idx = np.zeros(len(points), dtype=np.int64)
    for axis in sorted(axes):
        k = splits[list(axes).index(axis)]
        lo, hi = window.bounds[axis]
        sub = np.zeros(len(points), dtype=np.int64)
        for j in range(1, k):
            t = ceil_scaled(m, d, lo + (hi - lo) * Fraction(j, k))
            sub += (X[:, axis] >= t).astype(np.int64)
        idx = idx * k + sub
    return idx


def _map_levels(fn, levels, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, levels))
    return [fn(m) for m in levels]


def _thirds(rows):
    k = max(1, len(rows) // 3)
    return rows[:k], rows[-k:]


# -- experiments ------------------------------------------------------------


def cell_measures(config, threads=1):
    cells = config.window.split(config.grid_axes, config.grid_splits)
    return [
        estimate_measure(
            config.family, cell, config.epsilon, config.samples, config.seed, stream=i, threads=threads
        )
        for i, cell in enumerate(cells)
    ]


def run_equidist(config, points=None, threads=None):
    threads = config.threads if threads is None else threads
    points = points or _Points(config)
    mus = cell_measures(config, threads)
    mu_vals = [e.value for e in mus]
    fam = config.family

    def level(m):
        try:
            T, counts = points.summary(m, config.window)
        except BudgetExceededError as exc:
            return {"m": m, "error": str(exc)}
        D = discrepancy(counts, mu_vals)
        return {"m": m, "T": T, "D": D, "counts": counts}

    rows = _map_levels(level, config.levels, threads)
    ok = [r for r in rows if "error" not in r and r["D"] is not None]
    return {
        "rows": rows,
        "cell_mu": [e.value for e in mus],
        "cell_mu_stderr": [None if math.isnan(e.std_error) else e.std_error for e in mus],
        "cell_hits": [e.hits for e in mus],
        "spearman_m_D": spearman([r["m"] for r in ok], [r["D"] for r in ok]),
        "levels_used": len(ok),
    }


def run_ratio_test(config, points=None, threads=None):
    threads = config.threads if threads is None else threads
    points = points or _Points(config)
    fam = config.family
    mu1 = estimate_measure(fam, config.window, config.epsilon, config.samples, config.seed,
                           stream=_RATIO_STREAM, threads=threads)
    mu2 = estimate_measure(fam, config.window2, config.epsilon, config.samples, config.seed,
                           stream=_RATIO_STREAM + 1, threads=threads)
    if config.window == config.window2:
        mu2 = mu1
    mu_ratio = mu1.value / mu2.value if mu2.value else None
    mu_ratio_se = None
    if mu_ratio is not None and mu1.value:
        mu_ratio_se = mu_ratio * math.hypot(mu1.std_error / mu1.value, mu2.std_error / mu2.value)

    def level(m):
        try:
            n1 = points.count(m, config.window)
            n2 = points.count(m, config.window2)
        except BudgetExceededError as exc:
            return {"m": m, "error": str(exc)}
        row = {"m": m, "N1": n1, "N2": n2, "ratio": n1 / n2 if n2 else None, "flag": None}
        if not n2:
            row["flag"] = "N2=0"
        return row

    rows = _map_levels(level, config.levels, threads)
    good = [r for r in rows if "error" not in r and r["ratio"] is not None]
    summary = {"mu_ratio": mu_ratio, "mu_ratio_stderr": mu_ratio_se}
    if good and mu_ratio is not None:
        first, last = _thirds(good)
        summary["median_dev_mu_first_third"] = median(abs(r["ratio"] - mu_ratio) for r in first)
        summary["median_dev_mu_last_third"] = median(abs(r["ratio"] - mu_ratio) for r in last)
    if good and config.ratio_target is not None:
        first, last = _thirds(good)
        summary["median_dev_target_first_third"] = median(abs(r["ratio"] - config.ratio_target) for r in first)
        summary["median_dev_target_last_third"] = median(abs(r["ratio"] - config.ratio_target) for r in last)
    return {"rows": rows, "summary": summary}


def run_omega_trend(config, points=None, threads=None):
    if config.family.kind != DET:
        raise ValueError("the omega trend is only defined for the determinant family")
    threads = config.threads if threads is None else threads
    points = points or _Points(config)
    n = config.family.n

    def level(m):
        try:
            T = points.count(m, config.window)
        except BudgetExceededError as exc:
            return {"m": m, "error": str(exc)}
        h = hecke_degree(n, m)
        return {"m": m, "T": T, "hecke": h, "normalized": T / h}

    rows = _map_levels(level, config.levels, threads)
    good = [r for r in rows if "error" not in r]
    cv = None
    if len(good) >= 2:
        _, last = _thirds(good)
        c = np.array([r["normalized"] for r in last])
        if len(c) >= 2 and c.mean() > 0:
            cv = float(c.std() / c.mean())
    return {
        "rows": rows,
        "summary": {
            "cv_last_third": cv,
            "spearman_T_hecke": spearman([r["T"] for r in good], [r["hecke"] for r in good]),
        },
    }


# -- report -----------------------------------------------------------------


def build_report(config, threads=None):
    """Run every configured experiment; returns ``(report dict, timings dict)``."""
    points = _Points(config)
    report = {"schema_version": SCHEMA_VERSION, "config": config.describe()}
    runners = {"equidist": run_equidist, "ratio": run_ratio_test, "omega": run_omega_trend}
    for name in config.experiments:
        report[name] = runners[name](config, points=points, threads=threads)
    errors = sorted(
        {(r["m"], r["error"]) for name in config.experiments for r in report[name]["rows"] if "error" in r}
    )
    report["errors"] = [{"m": m, "error": e} for m, e in errors]
    return report, points.timings


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_report(config, out, threads=None):
    """Write the JSON report plus ``levels.csv``, ``cells.csv`` and ``timings.csv`` beside it."""
    report, timings = build_report(config, threads)
    out = Path(out)
    _atomic_write(out, dumps_report(report))
    side = out.parent
    if "equidist" in report:
        eq = report["equidist"]
        lines = ["m,T_m,D_m"]
        cells = ["m,cell,n_i,mu_i,mu_stderr"]
        for r in eq["rows"]:
            if "error" in r:
                lines.append(f"{r['m']},,")
                continue
            lines.append(f"{r['m']},{r['T']},{'' if r['D'] is None else repr(r['D'])}")
            for i, (n, mu, se) in enumerate(zip(r["counts"], eq["cell_mu"], eq["cell_mu_stderr"])):
                cells.append(f"{r['m']},{i},{n},{mu!r},{'' if se is None else repr(se)}")
        _atomic_write(side / "levels.csv", "\n".join(lines) + "\n")
        _atomic_write(side / "cells.csv", "\n".join(cells) + "\n")
    tlines = ["m,window_hash,seconds"]
    for (m, w), sec in sorted(timings.items(), key=lambda kv: (kv[0][0], kv[0][1].hash())):
        tlines.append(f"{m},{w.hash()},{sec:.6f}")
    _atomic_write(side / "timings.csv", "\n".join(tlines) + "\n")
    return report
