"""Command-line front end.

Configuration is a flat ``key = value`` file; repeating a key builds a list
(used for the B and X schedules). Vectors are comma separated. Example::

    command = compare
    problem = waring
    m = 2,2,2,2,2
    B = 1000
    B = 10000
    window = 100

Results go to ``<out>/<command>.csv`` and ``<out>/<command>.json``; rows are
also streamed to stdout as they complete.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import ConfigInvalid, IntegerOverflow, ModulusTooLarge, OrbifoldError, TooLarge

SCHEMA = "orbifold-output/1"
COMMANDS = ("count", "predict", "compare", "fit", "omega-table", "arcs", "meanvalue")
PROBLEMS = ("M", "waring", "campana")

INT_KEYS = {"H", "N", "Q", "p_max", "T_max", "V", "samples", "k", "s", "window", "mc_samples", "n"}
FLOAT_KEYS = {"L", "delta"}
VEC_KEYS = {"m", "c", "gamma", "h"}
LIST_KEYS = {"B", "X"}
STR_KEYS = {"command", "problem", "name", "B_range", "X_range"}

DEFAULTS = {"problem": "M", "H": 1, "N": 0, "Q": 200, "p_max": 50, "V": 100, "L": 2000.0,
            "samples": 10_000, "delta": 0.01, "k": 2, "s": 6, "window": 0, "mc_samples": 0}

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 2, 3


def _parse_scalar(key, text):
    try:
        if key in INT_KEYS or key in LIST_KEYS:
            return int(text)
        if key in FLOAT_KEYS:
            return float(text)
        if key in VEC_KEYS:
            return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigInvalid(f"{key}: cannot parse {text!r}") from None
    if key in STR_KEYS:
        return text
    raise ConfigInvalid(f"unknown key {key!r}")


def parse_config(text):
    """Parse flat key = value text into a dict (LIST_KEYS become lists)."""
    cfg = {}
    for lineno, raw in enumerate(text.replace(";", "\n").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"line {lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        val = _parse_scalar(key, value)
        if key in LIST_KEYS:
            cfg.setdefault(key, []).append(val)
        elif key in cfg:
            raise ConfigInvalid(f"{key}: given twice")
        else:
            cfg[key] = val
    return cfg


def _geometric(spec, key):
    try:
        start, stop, factor = spec.split(":")
        start, stop, factor = int(start), int(stop), float(factor)
    except ValueError:
        raise ConfigInvalid(f"{key}: expected start:stop:factor") from None
    if start < 1 or factor <= 1:
        raise ConfigInvalid(f"{key}: need start >= 1 and factor > 1")
    out, x = [], float(start)
    while round(x) <= stop:
        out.append(int(round(x)))
        x *= factor
    return out


def validate(cfg):
    """Fill defaults and check every field before any work starts."""
    cfg = {**DEFAULTS, **cfg}
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigInvalid(f"command: must be one of {', '.join(COMMANDS)}")
    if cfg["problem"] not in PROBLEMS:
        raise ConfigInvalid(f"problem: must be one of {', '.join(PROBLEMS)}")
    for key in ("B", "X"):
        rng = cfg.pop(f"{key}_range", None)
        if rng:
            cfg[key] = list(cfg.get(key, [])) + _geometric(rng, f"{key}_range")
    m = cfg.get("m")
    if cmd != "meanvalue":
        if not m:
            raise ConfigInvalid("m: exponent vector required")
        if any(mj < 2 for mj in m):
            raise ConfigInvalid("m: every exponent must be >= 2")
    if cmd in ("count", "predict", "compare", "fit", "arcs"):
        if not cfg.get("B"):
            raise ConfigInvalid("B: at least one value required")
        if any(b < 1 for b in cfg["B"]):
            raise ConfigInvalid("B: values must be >= 1")
    problem = cfg["problem"]
    if cmd in ("count", "predict", "compare", "fit", "arcs") and problem != "waring":
        c = cfg.get("c")
        if not c:
            raise ConfigInvalid("c: coefficient vector required")
        if any(x == 0 for x in c):
            raise ConfigInvalid("c: coefficients must be nonzero")
        want = len(m) - 1 if problem == "campana" else len(m)
        if problem == "campana" and len(c) == len(m):
            if c[-1] != -1:
                raise ConfigInvalid("c: with n+1 entries the last must be -1")
        elif len(c) != want:
            raise ConfigInvalid(f"c: expected {want} entries")
    if problem == "M" and cmd not in ("omega-table", "meanvalue"):
        k = len(m)
        if cfg.get("gamma") and (len(cfg["gamma"]) != k or any(g < 1 for g in cfg["gamma"])):
            raise ConfigInvalid("gamma: need len(m) positive entries")
        if cfg["H"] < 1:
            raise ConfigInvalid("H: must be >= 1")
        if cfg.get("h") and (len(cfg["h"]) != k or any(not 0 <= x < cfg["H"] for x in cfg["h"])):
            raise ConfigInvalid("h: need len(m) entries in [0, H)")
    if cmd == "arcs" and not cfg["delta"] > 0:
        raise ConfigInvalid("delta: must be positive")
    if cmd == "meanvalue":
        if not cfg.get("X") or any(x < 1 for x in cfg["X"]):
            raise ConfigInvalid("X: at least one positive value required")
        if cfg["s"] < 2 or cfg["s"] % 2:
            raise ConfigInvalid("s: must be a positive even integer")
        if cfg["k"] < 1:
            raise ConfigInvalid("k: must be >= 1")
    for key in ("Q", "p_max", "V", "samples"):
        if cfg[key] < 1:
            raise ConfigInvalid(f"{key}: must be >= 1")
    return cfg


def _vec(v):
    return ",".join(str(int(x)) for x in v)


def _instance(cfg, B):
    from .singular import ProblemInstance

    return ProblemInstance(m=cfg["m"], c=cfg["c"], gamma=cfg.get("gamma"), H=cfg["H"], h=cfg.get("h"),
                           N=cfg["N"], B=B)


def _base_row(cfg, **extra):
    row = {"schema": SCHEMA, "command": cfg["command"], "problem": cfg["problem"]}
    for key in ("m", "c", "gamma", "h"):
        if cfg.get(key):
            row[key] = _vec(cfg[key])
    row.update(extra)
    return row


# --- commands -------------------------------------------------------------


def _count(cfg, B):
    from . import counting

    problem = cfg["problem"]
    if problem == "waring":
        w = cfg["window"]
        table = counting.representation_table(B, B + w, cfg["m"])
        return sum(table.values()) / (w + 1)
    if problem == "campana":
        return counting.count_campana(cfg["c"], cfg["m"], B).count
    return counting.count_M(_instance(cfg, B)).count


def _predict(cfg, B, cache):
    from . import singular

    problem = cfg["problem"]
    if problem == "waring":
        vals = [singular.waring_main_term(N, cfg["m"], cfg["Q"]) for N in range(B, B + cfg["window"] + 1)]
        main = sum(v.main_term for v in vals) / len(vals)
        return {"prediction": main, "series": vals[0].series.value, "integral": vals[0].integral,
                "series_tail": vals[0].series.tail_bound}
    if problem == "campana":
        if "lc" not in cache:
            c = tuple(cfg["c"]) if len(cfg["c"]) == len(cfg["m"]) else tuple(cfg["c"]) + (-1,)
            cache["lc"] = singular.leading_constant(c, cfg["m"], cfg["V"], cfg["p_max"], cfg.get("T_max"),
                                                    cfg["L"])
        lc = cache["lc"]
        gexp = sum(1.0 / mj for mj in cfg["m"]) - 1.0
        return {"prediction": lc.value * B**gexp, "constant": lc.value, "v_tail": lc.v_tail,
                "p_tail": lc.p_tail}
    pred = singular.predict(_instance(cfg, B), cfg["Q"], cfg["L"])
    out = {"prediction": pred.main_term, "series": pred.series.value, "integral": pred.integral,
           "series_tail": pred.series.tail_bound}
    if cfg["mc_samples"]:
        from .integral import density_monte_carlo

        out["integral_mc"] = density_monte_carlo(cfg["c"], cfg["m"], cfg["N"] / B, cfg["mc_samples"],
                                                 seed=cfg["seed"])
    return out


def _rows_schedule(cfg):
    cache = {}
    for B in cfg["B"]:
        t0 = time.perf_counter()
        row = _base_row(cfg, B=B)
        if cfg["problem"] == "M":
            row["N"] = cfg["N"]
            row["H"] = cfg["H"]
        if cfg["problem"] == "waring":
            row["window"] = cfg["window"]
        if cfg["command"] in ("count", "compare", "fit"):
            row["count"] = _count(cfg, B)
        if cfg["command"] in ("predict", "compare"):
            row.update(_predict(cfg, B, cache))
        if "count" in row and row.get("prediction"):
            row["ratio"] = row["count"] / row["prediction"]
        row["elapsed"] = time.perf_counter() - t0
        yield row


def _rows_fit(cfg):
    from .counting import exponent_fit

    points = []
    for row in _rows_schedule(cfg):
        row["kind"] = "point"
        points.append((row["B"], row["count"]))
        yield row
    slope, intercept, resid = exponent_fit(points)
    yield _base_row(cfg, kind="fit", slope=slope, intercept=intercept, residual=resid,
                    expected=sum(1.0 / mj for mj in cfg["m"]) - 1.0)


def _rows_omega(cfg):
    from . import combinatorics as comb

    m = tuple(cfg["m"])
    for T in comb.local_patterns(m):
        label = " ".join(f"s{q[1]}" if q[0] == "s" else f"t{q[1]}.{q[2]}" for q in sorted(T))
        yield _base_row(cfg, positions=label or "-", size=len(T), omega=comb.omega_positions(T, m))


def _rows_arcs(cfg):
    from .circle import coordinate_range, dissect, minor_sup_sample

    m = cfg["m"]
    for B in cfg["B"]:
        t0 = time.perf_counter()
        d = dissect(B, cfg["delta"], len(m) - 1, max(m), enforce_range=False)
        row = _base_row(cfg, B=B, delta=cfg["delta"], Q=d.Q, arcs=len(d.majors), radius=d.radius,
                        measure=d.measure(), measure_bound=4 * B ** (3 * cfg["delta"] - 1))
        if cfg["problem"] == "M" and B >= 2:
            inst = _instance(cfg, B)
            sup = minor_sup_sample(inst, d, cfg["samples"])
            j = inst.n
            trivial = len(range(1, coordinate_range(B, inst.gamma[j], inst.m[j]) + 1))
            row.update(minor_sup=sup, minor_ratio=sup / trivial if trivial else 0.0)
        row["elapsed"] = time.perf_counter() - t0
        yield row


def _rows_meanvalue(cfg):
    from .circle import vinogradov_mean_value

    H, h = cfg["H"], (cfg["h"][0] if cfg.get("h") else 0)
    for X in cfg["X"]:
        t0 = time.perf_counter()
        count = vinogradov_mean_value(X, cfg["k"], cfg["s"], H=H, h=h)
        size = len(range(h % H if h % H else H, X + 1, H))
        yield _base_row(cfg, X=X, k=cfg["k"], s=cfg["s"], H=H, h=_vec((h,)), count=count,
                        ratio=count / size ** (cfg["s"] - cfg["k"]) if size else 0.0,
                        elapsed=time.perf_counter() - t0)


def rows(cfg):
    cmd = cfg["command"]
    if cmd in ("count", "predict", "compare"):
        return _rows_schedule(cfg)
    if cmd == "fit":
        return _rows_fit(cfg)
    if cmd == "omega-table":
        return _rows_omega(cfg)
    if cmd == "arcs":
        return _rows_arcs(cfg)
    return _rows_meanvalue(cfg)


# --- output ---------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    return str(v)


def to_csv(records):
    """CSV text for the rows; elapsed times are left to the JSON output."""
    cols = []
    for r in records:
        for k in r:
            if k != "elapsed" and k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_fmt(r[k]) if k in r else "" for k in cols])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def run(cfg, out_dir=None, stream=sys.stdout):
    records = []
    for r in rows(cfg):
        records.append(r)
        if stream is not None:
            print(json.dumps({k: _jsonable(v) for k, v in r.items()}), file=stream, flush=True)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        base = os.path.join(out_dir, cfg["command"])
        with open(base + ".csv", "w", newline="") as fh:
            fh.write(to_csv(records))
        meta = {"schema": SCHEMA, "version": __version__, "threads": cfg.get("threads"), "seed": cfg.get("seed")}
        with open(base + ".json", "w") as fh:
            json.dump({"meta": meta, "rows": [{k: _jsonable(v) for k, v in r.items()} for r in records]},
                      fh, indent=1)
    return records


def build_parser():
    ap = argparse.ArgumentParser(prog="orbifold", description="Counting experiments for m-full Diophantine problems.")
    ap.add_argument("--config", required=True, help="flat key = value config file")
    ap.add_argument("--out", default=None, help="directory for CSV and JSON output")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo checks")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override or add a config entry")
    ap.add_argument("--quiet", action="store_true", help="do not stream rows to stdout")
    ap.add_argument("--version", action="version", version=__version__)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
        text += "\n" + "\n".join(args.set)
        cfg = validate(parse_config(text))
        if args.threads < 1:
            raise ConfigInvalid("threads: must be >= 1")
        cfg["threads"], cfg["seed"] = args.threads, args.seed
        run(cfg, args.out, None if args.quiet else sys.stdout)
    except (TooLarge, ModulusTooLarge, IntegerOverflow) as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigInvalid, OSError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OrbifoldError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
