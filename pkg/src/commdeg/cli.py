"""Command-line experiment runner: ``commdeg run|validate <config>``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cayley import BallCache, BallTooLargeError, FBallSpec, coset_density_series, enumerate_ball, growth_fit
from .config import ConfigError, Experiment, load_config
from .estimator import BudgetExceeded, DcSeries, dc_series
from .groups import GroupError, center, named_group
from .theory import (
    INCONCLUSIVE,
    CheckResult,
    band_check,
    centralizer_linear_bound_check,
    decay_trend_check,
    gallagher_check,
    gustafson_check,
    index_bound_check,
    negligibility_report,
    quotient_bound_check,
    translation_length,
    jsonable,
)

log = logging.getLogger("commdeg")

SERIES_HEADER = ["n", "ball_size", "mode", "value", "exact_num", "exact_den", "ci_lo", "ci_hi", "seed"]


def _fmt(x: float) -> str:
    return repr(float(x))


def series_csv(series: DcSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SERIES_HEADER)
    for n, r in series.entries:
        w.writerow([
            n,
            r.support_size,
            r.mode,
            _fmt(r.value),
            r.exact.numerator if r.exact is not None else "",
            r.exact.denominator if r.exact is not None else "",
            _fmt(r.ci95[0]) if r.ci95 else "",
            _fmt(r.ci95[1]) if r.ci95 else "",
            r.seed if r.seed is not None else "",
        ])
    return buf.getvalue()


def _write(path: Path, text: str) -> str:
    data = text.encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _dump_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, ensure_ascii=False) + "\n"


class Runner:
    def __init__(self, exp: Experiment, out: Path, threads: int = 1, cache: BallCache | bool = False):
        self.exp = exp
        self.out = out
        self.threads = threads
        self.cache = cache
        self.times: dict = {}
        self.series: dict = {}

    def _timed(self, key, fn, *a, **kw):
        t = time.perf_counter()
        try:
            return fn(*a, **kw)
        finally:
            self.times[key] = round(time.perf_counter() - t, 6)

    def run_series(self, gens, family=None, fball=None) -> DcSeries:
        e = self.exp
        return dc_series(
            e.group,
            e.radii,
            family or e.family,
            e.settings,
            equations=e.equations,
            generators=gens,
            laziness=e.laziness,
            padding_element=e.padding_element,
            padding_schedule=e.padding_schedule,
            fball=fball if fball is not None else e.fball,
            cache=self.cache,
        )

    def run(self) -> dict:
        e = self.exp
        self.out.mkdir(parents=True, exist_ok=True)
        e.settings.threads = self.threads
        files = {}
        for i, (name, gens) in enumerate(e.generating_sets):
            s = self._timed(f"series[{name}]", self.run_series, gens)
            self.series[name] = s
            fname = "series.csv" if i == 0 else f"series_{name}.csv"
            files[fname] = _write(self.out / fname, series_csv(s))

        files["growth.csv"] = _write(self.out / "growth.csv", self._timed("growth", self.growth))
        if e.coset is not None:
            files["coset_density.csv"] = _write(self.out / "coset_density.csv", self._timed("coset", self.coset_csv))
        checks = []
        for i, c in enumerate(e.checks):
            checks.extend(self._timed(f"check[{i}:{c['type']}]", self.run_check, c, i))
        files["checks.json"] = _write(self.out / "checks.json", _dump_json([c.to_json() for c in checks]))
        fit = self.fit
        if fit is not None:
            files["growth_fit.json"] = _write(self.out / "growth_fit.json", _dump_json({
                "radii": fit.radii, "sizes": fit.sizes,
                "poly_degree_estimate": round(fit.poly_degree_estimate, 12),
                "exp_rate_estimate": round(fit.exp_rate_estimate, 12),
                "classification": fit.classification,
                "thresholds": list(fit.thresholds),
            }))
        manifest = {
            "name": e.name,
            "config": {k: v for k, v in e.raw.items()},
            "code_version": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "group_fingerprint": e.group.fingerprint(),
            "outputs": files,
            "wall_times_seconds": self.times,
        }
        (self.out / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")
        return {"checks": checks, "files": files}

    # -- pieces ------------------------------------------------------------------
    fit = None

    def growth(self) -> str:
        e = self.exp
        gens = e.generating_sets[0][1]
        B = enumerate_ball(e.group, e.radii[-1], gens, cache=self.cache)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "ball_size", "ratio"])
        for n in e.radii:
            size = B.size(n)
            ratio = _fmt(size / B.size(n - 1)) if n > 0 else ""
            w.writerow([n, size, ratio])
        sizes = B.sizes()
        if len(sizes) >= 6:
            g = e.growth
            lo = int(g.get("from", 0))
            radii = list(range(lo, len(sizes)))
            self.fit = growth_fit(
                sizes[lo:], radii,
                float(g.get("exp_threshold", 1.05)), float(g.get("poly_threshold", 1.02)),
            )
        return buf.getvalue()

    def coset_csv(self) -> str:
        e = self.exp
        c = e.coset
        hom = e.homs[c["hom"]]
        rows = coset_density_series(e.group, hom, c["element"], int(c.get("n_max", e.radii[-1])), cache=self.cache)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "ball_size", "count", "value_num", "value_den", "value", "max_deviation"])
        for r in rows:
            w.writerow([r.n, r.ball_size, r.count, r.value.numerator, r.value.denominator,
                        _fmt(r.value), _fmt(r.max_deviation)])
        return buf.getvalue()

    def run_check(self, c: dict, i: int) -> list:
        e = self.exp
        G = e.group
        t = c["type"]
        window = tuple(c["window"]) if "window" in c else None
        main = self.series[e.generating_sets[0][0]]
        if t == "gustafson":
            names = c.get("corpus")
            corpus = [named_group(n) for n in names] if names else [G]
            return gustafson_check(corpus, names or [e.name])
        if t == "gallagher":
            hom = e.homs[c["hom"]] if "hom" in c else None
            return [gallagher_check(G, hom if hom is not None else center(G), e.name)]
        if t == "quotient-bound":
            return [quotient_bound_check(G, e.homs[c["hom"]], main, window, float(c.get("tolerance", 0.05)))]
        if t == "index-bound":
            hom = e.homs[c["hom"]]
            sub = self.run_series(e.generating_sets[0][1], "f-ball", FBallSpec.kernel(hom, f"ker({c['hom']})"))
            return [index_bound_check(main, sub, int(c.get("index", hom.index)), window,
                                      float(c.get("tolerance", 0.05)))]
        if t == "negligibility":
            rep = negligibility_report(G, int(c.get("n_max", e.radii[-1])), int(c.get("samples", 100)),
                                       int(c.get("seed", 0)))
            rows = [
                {"n": r.n, "ball_size": r.ball_size, "torsion_density": r.torsion_density,
                 "max_centralizer_density": r.max_centralizer_density, "sample_size": r.sample_size,
                 "argmax": r.argmax}
                for r in rep.rows
            ]
            return [CheckResult("negligibility", INCONCLUSIVE, None, None, 0.0,
                                ("diagnostic report; " if rep.torsion_available else "torsion series unavailable; ")
                                + rep.note, {"rows": rows})]
        if t == "translation-length":
            rep = translation_length(G, e.check_elements[i], int(c.get("m_max", 10)))
            return [CheckResult("translation-length", INCONCLUSIVE, rep.estimate, None, 0.0,
                                f"running infimum of |g^m|/m for g={rep.element}"
                                + ("; truncated (power left the enumerated ball)" if rep.truncated else ""),
                                {"ratios": [[m, q] for m, q in rep.ratios], "running_inf": rep.running_inf})]
        if t == "centralizer-bound":
            return [centralizer_linear_bound_check(G, int(c.get("samples", 100)), int(c.get("n", 6)),
                                                   int(c.get("p", 1)), int(c.get("seed", 0)))]
        if t == "decay-trend":
            sw = c.get("sampled_window")
            return [decay_trend_check(main, tuple(c["exact_window"]), tuple(sw) if sw else None)]
        if t == "band":
            return [band_check(main, c["target"], float(c["tolerance"]), window, c.get("name", "band"))]
        raise ValueError(f"unknown check {t!r}")


def _print_diags(diags) -> None:
    for d in diags:
        print(str(d), file=sys.stderr)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="commdeg", description="Degree-of-commutativity experiment runner")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--no-cache", action="store_true", help="disable ball caching")
    p_run.add_argument("--cache-dir", default=None, help="persist balls under this directory")
    p_run.add_argument("--output-dir", default=None)
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        exp, diags = load_config(args.config)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_diags(diags)
    if exp is None:
        return 2
    if args.command == "validate":
        print("config ok")
        return 0

    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2
    out = Path(args.output_dir) if args.output_dir else (exp.output_dir or Path("out"))
    if not out.is_absolute() and not args.output_dir and exp.output_dir:
        out = exp.base_dir / out
    cache = False if args.no_cache else BallCache(Path(args.cache_dir) if args.cache_dir else None)
    try:
        result = Runner(exp, out, args.threads, cache).run()
    except (BallTooLargeError, BudgetExceeded, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except (GroupError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    failed = [c for c in result["checks"] if c.status == "fail"]
    for c in result["checks"]:
        print(f"{c.status:12s} {c.name}: {c.detail}")
    print(f"outputs written to {out}")
    return 4 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
