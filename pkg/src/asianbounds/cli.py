"""Command-line front end: price scenario files and regenerate the reference tables.

Exit codes: 0 success, 2 input error (bad file, schema, invariant), 3 numerical
failure.  The worker count for Monte Carlo is read from ``ASIANBOUNDS_WORKERS``
and never changes results.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from contextlib import contextmanager
from typing import Any

import numpy as np
import yaml

from . import basket, gaussian_asian, levy_asian, montecarlo, vwap
from .bounds_core import minimize_ub
from .errors import PricingError, ValidationError
from .models import (BM, DEFAULT_CMO_NODES, NIG, VG, BasketSpec, ContinuousUniform, DiscreteMeasure,
                     GammaVolumeSpec, GbmSpec, LevySpec, Merton, cmo_discretize)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
DEFAULT_TABLE_PATHS = 1_000_000


class ScenarioError(ValidationError):
    """Schema violation, reported with the field path and source line."""


class UnsupportedTable(ValidationError):
    pass


# ---------------------------------------------------------------------------
# scenario schema
# ---------------------------------------------------------------------------

MODEL_KEYS = {
    "gbm": {"sigma"},
    "bm": {"sigma"},
    "vg": {"sigma", "nu", "theta"},
    "nig": {"alpha", "beta", "delta"},
    "merton": {"sigma", "lam", "mu_j", "delta_j"},
}
COMMON_MODEL_KEYS = {"type", "s0", "r", "q"}

SCHEMA = {
    "asian": {"required": {"model", "measure", "K", "method"},
              "optional": {"name", "kind", "numerics"},
              "methods": {"lb", "ub", "mc"}},
    "vwap": {"required": {"model", "volume", "schedule", "K", "method"},
             "optional": {"name", "kind", "numerics"},
             "methods": {"lb", "mc"}},
    "basket": {"required": {"basket", "K", "method"},
               "optional": {"name", "kind", "numerics"},
               "methods": {"lb", "approx", "mc"}},
}
MEASURE_KEYS = {"type", "T", "n", "times", "weights"}
SCHEDULE_KEYS = {"T", "n", "times"}
VOLUME_KEYS = {"alpha", "beta", "time_unit"}
BASKET_KEYS = {"T", "r", "assets", "rho", "groups", "rho_groups"}
ASSET_KEYS = {"s0", "sigma", "q", "leg"}
GROUP_KEYS = {"count", "s0", "sigma", "q", "leg"}
NUMERICS_KEYS = {"paths", "seed", "damping", "grid", "cross_check", "bump", "gl_order", "n_cmo", "ub_bracket"}
DAMPING_KEYS = {"alpha1", "alpha2", "beta"}
GRID_KEYS = {"n_xi", "n_zeta", "n_1d", "scale_xi", "scale_zeta"}


class Scenario:
    """Parsed scenario document with a field-path -> source-line index."""

    def __init__(self, data: dict, lines: dict, source: str = "<string>"):
        self.data, self.lines, self.source = data, lines, source

    def fail(self, path: str, msg: str):
        line = self.lines.get(path)
        where = f"{self.source}:{line}" if line else self.source
        raise ScenarioError(f"{where}: field '{path}': {msg}")

    def section(self, path: str, allowed: set, required: set = frozenset()) -> dict:
        node = self.get(path)
        if not isinstance(node, dict):
            self.fail(path, "expected a mapping")
        for key in node:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else key, f"unknown key (allowed: {', '.join(sorted(allowed))})")
        for key in sorted(required - set(node)):
            self.fail(path or "<root>", f"missing required key '{key}'")
        return node

    def get(self, path: str, default: Any = None):
        node = self.data
        for part in filter(None, path.split(".")):
            if isinstance(node, list) and part.isdigit() and int(part) < len(node):
                node = node[int(part)]
            elif isinstance(node, dict) and part in node:
                node = node[part]
            else:
                return default
        return node

    def number(self, path: str, default: Any = None, positive=False, integer=False):
        val = self.get(path, default)
        if val is None:
            self.fail(path, "required number is missing")
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(path, f"expected a number, got {val!r}")
        if integer and int(val) != val:
            self.fail(path, f"expected an integer, got {val!r}")
        if positive and not val > 0:
            self.fail(path, f"must be positive, got {val!r}")
        return int(val) if integer else float(val)


def _index_lines(node, prefix="", out=None):
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = f"{prefix}.{key.value}" if prefix else str(key.value)
            out[path] = key.start_mark.line + 1
            _index_lines(value, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            path = f"{prefix}.{i}"
            out[path] = item.start_mark.line + 1
            _index_lines(item, path, out)
    return out


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{source}: not valid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError(f"{source}: top level must be a mapping")
    return Scenario(data, _index_lines(root), source)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from None
    return parse_scenario(text, path)


# ---------------------------------------------------------------------------
# building domain objects
# ---------------------------------------------------------------------------

@contextmanager
def _field(sc: Scenario, path: str):
    """Re-raise model invariant failures against the given field."""
    try:
        yield
    except ScenarioError:
        raise
    except ValidationError as exc:
        sc.fail(path, str(exc))


def build_model(sc: Scenario):
    node = sc.get("model")
    if not isinstance(node, dict) or "type" not in node:
        sc.fail("model", "expected a mapping with a 'type' key")
    kind = node["type"]
    if kind not in MODEL_KEYS:
        sc.fail("model.type", f"unknown model type {kind!r} (allowed: {', '.join(MODEL_KEYS)})")
    sc.section("model", COMMON_MODEL_KEYS | MODEL_KEYS[kind], {"type", "r"} | MODEL_KEYS[kind])
    s0 = sc.number("model.s0", 100.0, positive=True)
    r = sc.number("model.r")
    q = sc.number("model.q", 0.0)
    p = {k: sc.number(f"model.{k}") for k in MODEL_KEYS[kind]}
    with _field(sc, "model"):
        if kind == "gbm":
            return GbmSpec(s0, p["sigma"], r, q)
        proc = {"bm": BM, "vg": VG, "nig": NIG, "merton": Merton}[kind](**p)
        return LevySpec(proc, r, s0, q)


def _times(sc: Scenario, path: str):
    T = sc.number(f"{path}.T", positive=True)
    if sc.get(f"{path}.times") is not None:
        times = sc.get(f"{path}.times")
        if not isinstance(times, list) or not times:
            sc.fail(f"{path}.times", "expected a nonempty list")
        return T, np.asarray([sc.number(f"{path}.times.{i}") for i in range(len(times))])
    n = sc.number(f"{path}.n", integer=True, positive=True)
    return T, T * np.arange(1, n + 1) / n


def build_measure(sc: Scenario):
    node = sc.section("measure", MEASURE_KEYS, {"type", "T"})
    if node["type"] == "continuous":
        with _field(sc, "measure"):
            return ContinuousUniform(sc.number("measure.T", positive=True))
    if node["type"] != "discrete":
        sc.fail("measure.type", "must be 'discrete' or 'continuous'")
    T, times = _times(sc, "measure")
    if not np.isclose(times[-1], T):
        sc.fail("measure.times", "last monitoring date must equal T")
    w = sc.get("measure.weights")
    weights = np.full(times.size, 1.0 / times.size) if w is None else \
        np.asarray([sc.number(f"measure.weights.{i}") for i in range(len(w))])
    with _field(sc, "measure"):
        return DiscreteMeasure(times, weights)


def _numerics(sc: Scenario) -> dict:
    if sc.get("numerics") is None:
        return {}
    sc.section("numerics", NUMERICS_KEYS)
    out = {}
    if sc.get("numerics.paths") is not None:
        out["paths"] = sc.number("numerics.paths", integer=True, positive=True)
    if sc.get("numerics.seed") is not None:
        out["seed"] = sc.number("numerics.seed", integer=True)
    if sc.get("numerics.damping") is not None:
        sc.section("numerics.damping", DAMPING_KEYS)
        with _field(sc, "numerics.damping"):
            out["damping"] = levy_asian.DampingParams(
                **{k: sc.number(f"numerics.damping.{k}") for k in sc.get("numerics.damping")})
    if sc.get("numerics.grid") is not None:
        sc.section("numerics.grid", GRID_KEYS)
        vals = {k: sc.number(f"numerics.grid.{k}", integer=k.startswith("n_")) for k in sc.get("numerics.grid")}
        with _field(sc, "numerics.grid"):
            out["grid"] = levy_asian.FourierGrid(**vals)
    for key, integer in (("bump", False), ("gl_order", True), ("n_cmo", True)):
        if sc.get(f"numerics.{key}") is not None:
            out[key] = sc.number(f"numerics.{key}", integer=integer, positive=True)
    if sc.get("numerics.cross_check") is not None:
        val = sc.get("numerics.cross_check")
        if not isinstance(val, bool):
            sc.fail("numerics.cross_check", "expected true or false")
        out["cross_check"] = val
    if sc.get("numerics.ub_bracket") is not None:
        br = sc.get("numerics.ub_bracket")
        if not (isinstance(br, list) and len(br) == 2):
            sc.fail("numerics.ub_bracket", "expected [lo, hi]")
        out["ub_bracket"] = (sc.number("numerics.ub_bracket.0"), sc.number("numerics.ub_bracket.1"))
    return out


def build_basket(sc: Scenario, K: float) -> BasketSpec:
    node = sc.section("basket", BASKET_KEYS, {"T", "r"})
    T, r = sc.number("basket.T", positive=True), sc.number("basket.r")
    if ("assets" in node) == ("groups" in node):
        sc.fail("basket", "give exactly one of 'assets' (with 'rho') or 'groups' (with 'rho_groups')")
    rows, leg_of = [], []
    if "assets" in node:
        entries, keys, rho_key = node["assets"], ASSET_KEYS, "rho"
    else:
        entries, keys, rho_key = node["groups"], GROUP_KEYS, "rho_groups"
    if not isinstance(entries, list) or not entries:
        sc.fail(f"basket.{'assets' if rho_key == 'rho' else 'groups'}", "expected a nonempty list")
    base = "basket.assets" if rho_key == "rho" else "basket.groups"
    counts = []
    for i, _ in enumerate(entries):
        p = f"{base}.{i}"
        e = sc.section(p, keys, keys - {"q"})
        if e["leg"] not in ("long", "short"):
            sc.fail(f"{p}.leg", "must be 'long' or 'short'")
        cnt = sc.number(f"{p}.count", integer=True, positive=True) if "count" in keys else 1
        counts.append(cnt)
        rows += [(sc.number(f"{p}.s0"), sc.number(f"{p}.sigma"), sc.number(f"{p}.q", 0.0))] * cnt
        leg_of += [e["leg"]] * cnt
    if rho_key not in node:
        sc.fail("basket", f"missing required key '{rho_key}'")
    rho_in = node[rho_key]
    g = len(entries)
    if not (isinstance(rho_in, list) and len(rho_in) == g and all(isinstance(rw, list) and len(rw) == g for rw in rho_in)):
        sc.fail(f"basket.{rho_key}", f"expected a {g}x{g} matrix")
    rho_small = np.array([[sc.number(f"basket.{rho_key}.{i}.{j}") for j in range(g)] for i in range(g)])
    if rho_key == "rho":
        rho = rho_small
    else:
        # group-level block matrix; diagonal entries are the intra-group correlations
        lab = np.repeat(np.arange(g), counts)
        rho = rho_small[lab[:, None], lab[None, :]]
        np.fill_diagonal(rho, 1.0)
    s0, sigma, q = (np.array(c) for c in zip(*rows))
    long_idx = tuple(i for i, leg in enumerate(leg_of) if leg == "long")
    short_idx = tuple(i for i, leg in enumerate(leg_of) if leg == "short")
    try:
        return BasketSpec(s0, sigma, q, rho, r, K, T, long_idx, short_idx)
    except ValidationError as exc:
        sc.fail(f"basket.{rho_key}" if "correlation" in str(exc) else "basket", str(exc))


def build(sc: Scenario) -> dict:
    """Validate the whole document and return the priced-object bundle."""
    kind = sc.get("kind", "asian")
    if kind not in SCHEMA:
        sc.fail("kind", f"unknown kind {kind!r} (allowed: {', '.join(SCHEMA)})")
    spec = SCHEMA[kind]
    sc.section("", spec["required"] | spec["optional"], spec["required"])
    method = sc.get("method")
    if method not in spec["methods"]:
        sc.fail("method", f"method {method!r} not available for {kind} (allowed: {', '.join(sorted(spec['methods']))})")
    K = sc.number("K")
    if K < 0:
        sc.fail("K", "strike must be nonnegative")
    out = {"kind": kind, "method": method, "K": K, "numerics": _numerics(sc), "name": sc.get("name", "")}
    if kind == "asian":
        out["model"], out["measure"] = build_model(sc), build_measure(sc)
    elif kind == "vwap":
        model = build_model(sc)
        sc.section("schedule", SCHEDULE_KEYS, {"T"})
        T, times = _times(sc, "schedule")
        sc.section("volume", VOLUME_KEYS, {"alpha", "beta"})
        unit = sc.get("volume.time_unit", 1.0)
        if unit == "interval":
            unit = float(np.diff(times, prepend=0.0)[-1])
        else:
            unit = sc.number("volume.time_unit", 1.0, positive=True)
        with _field(sc, "volume"):
            vol = GammaVolumeSpec(sc.number("volume.alpha"), sc.number("volume.beta"), unit)
        with _field(sc, "schedule"):
            out["scenario"] = vwap.VwapScenario(model, vol, times, K)
    else:
        out["basket"] = build_basket(sc, K)
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _levy_kw(num: dict) -> dict:
    return {k: num[k] for k in ("damping", "grid", "cross_check", "n_cmo") if k in num}


def _mc_args(num: dict, paths, seed):
    p = paths if paths is not None else num.get("paths", 100_000)
    s = seed if seed is not None else num.get("seed", 0)
    return int(p), int(s)


def evaluate(bundle: dict, paths=None, seed=None) -> dict:
    """Price one validated scenario; returns the output record (without runtime)."""
    kind, method, num = bundle["kind"], bundle["method"], bundle["numerics"]
    rec = {"name": bundle["name"], "kind": kind, "method": method, "value": None,
           "optimizer": None, "se": None, "paths": None, "seed": None, "diagnostics": {}}

    def from_bound(res):
        rec.update(value=res.value, optimizer=res.optimizer, diagnostics=dict(res.diag))

    def from_mc(est):
        rec.update(value=est.mean, se=est.se, paths=est.paths, seed=est.seed, diagnostics=dict(est.diag))

    if kind == "asian":
        model, mu, K = bundle["model"], bundle["measure"], bundle["K"]
        gbm = isinstance(model, GbmSpec)
        if method == "lb":
            if gbm:
                g = gaussian_asian.GaussianAsianScenario(model, mu, K)
                from_bound(gaussian_asian.lb_cmo(g, num.get("gl_order", gaussian_asian.GL_ORDER))
                           if isinstance(mu, ContinuousUniform) else gaussian_asian.lb_dmo(g))
            else:
                from_bound(levy_asian.lb_levy(model, mu, K, **_levy_kw(num)))
        else:
            p, s = _mc_args(num, paths, seed)
            dmu = mu if isinstance(mu, DiscreteMeasure) else \
                cmo_discretize(mu, num.get("n_cmo", DEFAULT_CMO_NODES), rule="midpoint")
            if method == "mc":
                from_mc(montecarlo.mc_asian(model, dmu, K, p, s))
            else:
                obj = montecarlo.asian_ub_objective(model, dmu, K, p, s)
                res = minimize_ub(obj, num.get("ub_bracket", (0.0, 3.0)))
                from_bound(res)
                rec.update(se=res.diag.get("se"), paths=p, seed=s)
    elif kind == "vwap":
        sc = bundle["scenario"]
        if method == "lb":
            from_bound(vwap.lb_vwap(sc, **({} if isinstance(sc.price, GbmSpec) else _levy_kw(num))))
        else:
            p, s = _mc_args(num, paths, seed)
            from_mc(vwap.mc_vwap(sc, p, s))
    else:
        spec = bundle["basket"]
        if method == "lb":
            from_bound(basket.lb_basket(spec))
        elif method == "approx":
            rec["value"] = basket.lau_lo_price(spec)
        else:
            p, s = _mc_args(num, paths, seed)
            from_mc(basket.mc_basket(spec, p, s))
    return rec


def evaluate_delta(bundle: dict) -> dict:
    if bundle["kind"] != "asian":
        raise ValidationError("greeks are available for asian scenarios only")
    model, mu, K, num = bundle["model"], bundle["measure"], bundle["K"], bundle["numerics"]
    h = num.get("bump", levy_asian.FD_BUMP)
    if isinstance(model, GbmSpec):
        val = gaussian_asian.delta_fd(gaussian_asian.GaussianAsianScenario(model, mu, K), h)
    else:
        val = levy_asian.delta_levy(model, mu, K, h=h, **_levy_kw(num))
    return {"name": bundle["name"], "kind": "asian", "method": "delta_lb", "value": val,
            "bump": h, "diagnostics": {}}


# ---------------------------------------------------------------------------
# reference tables
# ---------------------------------------------------------------------------

TABLE1 = {  # sigma: (LB^D, MC, SE)
    0.2: (3.0057, 3.0056, 0.0013),
    0.4: (5.5570, 5.5866, 0.0027),
    0.6: (8.1130, 8.1542, 0.0042),
    0.8: (10.6580, 10.7190, 0.0059),
}
TABLE4 = {  # K: (LB^BC, Lau & Lo, MC, SE)
    50.0: (98.0054, 98.0054, 98.0235, 0.0116),
    100.0: (50.9571, 50.9654, 50.968, 0.0114),
    150.0: (15.7622, 15.767, 15.7787, 0.008),
    200.0: (2.9862, 2.9715, 2.9999, 0.0037),
    250.0: (0.4303, 0.4222, 0.4379, 0.0014),
    300.0: (0.0551, 0.0528, 0.0565, 0.0005),
}
TABLE5 = {
    0.0: (143.937, 143.937, 144.023, 0.0715),
    50.0: (119.833, 119.834, 119.9215, 0.0671),
    100.0: (99.3342, 99.3511, 99.3813, 0.0625),
    150.0: (82.0757, 82.123, 82.1487, 0.058),
}


def table1_scenario(sigma: float) -> vwap.VwapScenario:
    T, n = 0.317, 80
    times = T * np.arange(1, n + 1) / n
    return vwap.VwapScenario(GbmSpec(100.0, sigma, 0.05), GammaVolumeSpec(10.0, 1.0, T / n), times, 100.0)


def table4_basket(K: float) -> BasketSpec:
    rho = np.array([[1.0, 0.7, 0.5], [0.7, 1.0, 0.3], [0.5, 0.3, 1.0]])
    return BasketSpec([60.0, 50.0, 40.0], 0.3, 0.03, rho, 0.05, K, 1.0, (0, 1, 2))


def table5_basket(K: float, n_long: int = 100, n_short: int = 100) -> BasketSpec:
    n = n_long + n_short
    lab = np.r_[np.zeros(n_long, int), np.ones(n_short, int)]
    rho = np.array([[0.6, 0.4], [0.4, 0.5]])[lab[:, None], lab[None, :]]
    np.fill_diagonal(rho, 1.0)
    s0 = np.where(lab == 0, 10.0, 9.0)
    sigma = np.where(lab == 0, 0.5, 0.3)
    q = np.where(lab == 0, 0.05, 0.03)
    return BasketSpec(s0, sigma, q, rho, 0.05, K, 1.0, tuple(range(n_long)), tuple(range(n_long, n)))


def _row(table, key_name, key, column, value, se, ref):
    diff = None if value is None or ref is None else abs(value - ref)
    return {"table": table, key_name: key, "column": column, "value": value, "se": se,
            "paper_value": ref, "abs_diff": diff}


def build_table(table_id: int, paths: int = DEFAULT_TABLE_PATHS, seed: int = 0) -> list:
    """Rows reproducing one reference table; ``paths=0`` skips the Monte Carlo column."""
    rows = []
    if table_id in (2, 3):
        raise UnsupportedTable(f"table {table_id} needs model parameters that the source does not publish")
    if table_id == 1:
        for sigma, (lb_p, mc_p, se_p) in TABLE1.items():
            sc = table1_scenario(sigma)
            rows.append(_row(1, "sigma", sigma, "LB^D", vwap.lb_vwap(sc).value, None, lb_p))
            if paths:
                est = vwap.mc_vwap(sc, paths, seed)
                rows.append(_row(1, "sigma", sigma, "MC", est.mean, est.se, mc_p))
    elif table_id in (4, 5):
        ref, make = (TABLE4, table4_basket) if table_id == 4 else (TABLE5, table5_basket)
        for K, (lb_p, ll_p, mc_p, se_p) in ref.items():
            spec = make(K)
            rows.append(_row(table_id, "K", K, "LB^BC", basket.lb_basket(spec).value, None, lb_p))
            rows.append(_row(table_id, "K", K, "Lau&Lo", basket.lau_lo_price(spec), None, ll_p))
            if paths:
                est = basket.mc_basket(spec, paths, seed)
                rows.append(_row(table_id, "K", K, "MC", est.mean, est.se, mc_p))
    else:
        raise UnsupportedTable(f"unknown table {table_id}; available: 1, 4, 5")
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def format_records(records: list, fmt: str) -> str:
    records = [_plain(r) for r in records]
    if fmt == "json-lines":
        return "".join(json.dumps(r, sort_keys=False) + "\n" for r in records)
    fields = []
    for r in records:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else ("" if v is None else v)
                         for k, v in r.items()})
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_price(args) -> list:
    bundle = build(load_scenario(args.scenario))
    t0 = time.perf_counter()
    rec = evaluate(bundle, args.paths, args.seed)
    rec["runtime_s"] = round(time.perf_counter() - t0, 6)
    return [rec]


def cmd_greeks(args) -> list:
    bundle = build(load_scenario(args.scenario))
    t0 = time.perf_counter()
    rec = evaluate_delta(bundle)
    rec["runtime_s"] = round(time.perf_counter() - t0, 6)
    return [rec]


def cmd_validate(args) -> list:
    bundle = build(load_scenario(args.scenario))
    return [{"scenario": args.scenario, "kind": bundle["kind"], "method": bundle["method"], "status": "ok"}]


def cmd_table(args) -> list:
    paths = DEFAULT_TABLE_PATHS if args.paths is None else args.paths
    return build_table(args.table_id, paths, 0 if args.seed is None else args.seed)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json-lines"), default="json-lines")
    common.add_argument("--paths", type=int, default=None, help="Monte Carlo path count")
    common.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="asianbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (("price", cmd_price, "price a scenario file"),
                               ("greeks", cmd_greeks, "finite-difference delta of the lower bound"),
                               ("validate", cmd_validate, "check a scenario file against the schema")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("scenario")
        p.set_defaults(func=fn)
    p = sub.add_parser("table", parents=[common], help="reproduce a reference table (1, 4 or 5)")
    p.add_argument("table_id", type=int)
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.paths is not None and args.paths < 0:
        print("error: --paths must be nonnegative", file=sys.stderr)
        return EXIT_INPUT
    try:
        records = args.func(args)
        _emit(format_records(records, args.format), args.out)
    except ValidationError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PricingError as exc:
        print(f"numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
