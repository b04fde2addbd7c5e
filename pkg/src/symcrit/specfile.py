"""TOML process/measure specifications.

A spec file is validated into a *normalized document*: every table present,
every default filled in, expressions kept as their source strings.  The
normalized document is what ``--print-spec`` emits, and re-validating it
yields the same document.  :func:`build` turns a normalized document into
engine objects (symbol, measure, SDE, diffusion).

Scalar processes only: drivers and coefficients are one-dimensional.
"""
from __future__ import annotations

import copy
import math
import os
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import tomli
import tomli_w

from .coef import Coefficient
from .errors import InputError
from .expr import ExprError, Expression, to_coefficient
from .levy import Atoms, LevyTriplet, StableSymmetric
from .measure import DiracAt, Density, GaussianParam, Samples
from .simulate import SDESpec
from .stationary import Diffusion1D
from .symbol import (DifferentialCharacteristics, Symbol, levy_symbol, symbol_additive,
                     symbol_diffusion, symbol_from_characteristics, symbol_gou, symbol_ou_type)

PROCESS_KINDS = ("levy", "ou", "sde", "additive", "diffusion1d", "gou", "characteristics")
MEASURE_KINDS = ("gaussian", "density", "samples", "dirac")
CONVENTIONS = ("canonical", "paper")


class SpecError(InputError):
    """Validation failure tied to a location in the source text (1-based)."""

    def __init__(self, message: str, path: tuple = (), line: Optional[int] = None,
                 column: Optional[int] = None):
        self.message, self.path, self.line, self.column = message, tuple(path), line, column
        super().__init__(self._render())

    def _render(self) -> str:
        where = ".".join(self.path)
        loc = f"line {self.line}, column {self.column}: " if self.line else ""
        return f"{loc}{where + ': ' if where else ''}{self.message}"

    def locate(self, text: str, expr_offset: int = 0) -> "SpecError":
        if self.line is None and self.path:
            pos = locate_key(text, self.path)
            if pos is not None:
                self.line, self.column = pos[0], pos[1] + expr_offset
                self.args = (self._render(),)
        return self


# ---------------------------------------------------------------------------
# schema

REQUIRED = object()


@dataclass(frozen=True)
class Field:
    kind: str                     # float, posfloat, int, posint, str, expr, interval, floats, bool, driver, choice
    default: object = REQUIRED
    choices: tuple = ()


DRIVER_SCHEMA = {
    "ell": Field("float", 0.0),
    "q": Field("nonneg", 0.0),
    "atoms": Field("atoms", None),
    "stable": Field("stable", None),
}

PROCESS_SCHEMA = {
    "levy": {"driver": Field("driver", {})},
    "ou": {"lambda": Field("posfloat"), "sigma": Field("posfloat")},
    "sde": {"a": Field("float", 0.0), "phi": Field("expr", "1"), "b_drift": Field("expr", None),
            "b": Field("float", 0.0), "driver": Field("driver", {"q": 1.0}), "driver_z": Field("driver", None)},
    "additive": {"b": Field("float", 1.0), "phi": Field("expr", "1"),
                 "driver_l": Field("driver", {"q": 1.0}), "driver_z": Field("driver", {})},
    "diffusion1d": {"b_drift": Field("expr"), "sigma": Field("expr"), "x0": Field("float", 0.0),
                    "support": Field("interval", [-math.inf, math.inf])},
    "gou": {"driver_u": Field("driver", {}), "driver_l": Field("driver", {})},
    "characteristics": {"ell": Field("expr", "0"), "q": Field("expr", "0"), "jumps": Field("driver", None)},
}

MEASURE_SCHEMA = {
    "gaussian": {"mean": Field("float", 0.0), "variance": Field("posfloat")},
    "density": {"density": Field("expr"), "support": Field("interval"), "normalize": Field("bool", False)},
    "samples": {"file": Field("str")},
    "dirac": {"mean": Field("float", 0.0)},
}

TABLES = {
    "grid": {"xi_min": Field("float", -5.0), "xi_max": Field("float", 5.0), "n": Field("posint", 101)},
    "quadrature": {"rel_tol": Field("posfloat", 1e-9)},
    "check": {"tol": Field("posfloat", 1e-6)},
    "simulate": {
        "t": Field("posfloat", 1e-3), "dt": Field("posfloat", 0.01), "n_paths": Field("posint", 100_000),
        "burn_in": Field("posfloat", 10.0), "seed": Field("int", 42), "x0": Field("float", 0.0),
        "xi": Field("floats", [1.0]), "t_end": Field("posfloat", 10.0), "n_samples": Field("posint", 10_000),
        "sample_gap": Field("posfloat", 1.0), "output": Field("choice", "path", ("path", "samples")),
    },
    "stationary": {"x_min": Field("float", None), "x_max": Field("float", None), "n": Field("posint", 401)},
    "fit": {"family": Field("choice", "gaussian", ("gaussian",)), "mean": Field("interval", [0.0, 0.0]),
            "variance": Field("interval", [0.01, 10.0]),
            "objective": Field("choice", "SupAbs", ("SupAbs", "L2")), "restarts": Field("posint", 5),
            "max_iter": Field("posint", 500), "tol": Field("posfloat", 1e-10)},
    "mode": {"convention": Field("choice", "canonical", CONVENTIONS)},
}
TOP_LEVEL = ("process", "measure") + tuple(TABLES)


# ---------------------------------------------------------------------------
# source locations

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\s\"]+?)\s*\]\s*(#.*)?$")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\"]+)\s*=\s*")


def locate_key(text: str, path: tuple) -> Optional[tuple]:
    """(line, column) of the value of ``path`` in ``text``, both 1-based.

    Falls back to the longest located prefix: a key inside an inline table
    is reported at its parent, a missing key at its table header.
    """
    for k in range(len(path), 0, -1):
        table, key = path[:k - 1], path[k - 1]
        current = None
        for n, line in enumerate(text.splitlines(), start=1):
            h = _HEADER.match(line)
            if h:
                current = tuple(p.strip().strip('"') for p in h.group(1).split("."))
                if current == path[:k]:
                    return n, line.index("[") + 1
                continue
            m = _KEY.match(line)
            if m and (current or ()) == table and m.group(1).strip('"') == key:
                return n, m.end() + 1
    return None


# ---------------------------------------------------------------------------
# validation

def _fail(msg, path):
    raise SpecError(msg, path)


def _number(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"expected a number, got {type(v).__name__}", path)
    v = float(v)
    if math.isnan(v):
        _fail("value must not be NaN", path)
    return v


def _check_value(f: Field, v, path):
    k = f.kind
    if k in ("float", "posfloat", "nonneg"):
        v = _number(v, path)
        if not math.isfinite(v):
            _fail("value must be finite", path)
        if k == "posfloat" and not v > 0:
            _fail("value must be positive", path)
        if k == "nonneg" and v < 0:
            _fail("value must be non-negative", path)
        return v
    if k in ("int", "posint"):
        if isinstance(v, bool) or not isinstance(v, int):
            _fail(f"expected an integer, got {type(v).__name__}", path)
        if k == "posint" and v < 1:
            _fail("value must be a positive integer", path)
        return int(v)
    if k == "bool":
        if not isinstance(v, bool):
            _fail("expected true or false", path)
        return v
    if k == "str":
        if not isinstance(v, str) or not v:
            _fail("expected a nonempty string", path)
        return v
    if k == "choice":
        if v not in f.choices:
            _fail(f"expected one of {', '.join(map(repr, f.choices))}, got {v!r}", path)
        return v
    if k == "expr":
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            v = repr(float(v))
        if not isinstance(v, str):
            _fail("expected an expression string", path)
        try:
            Expression(v)
        except ExprError as exc:
            err = SpecError(f"{exc.reason} at position {exc.position + 1} of {v!r}", path)
            err.expr_position = exc.position
            raise err from None
        return v
    if k == "interval":
        if not isinstance(v, list) or len(v) != 2:
            _fail("expected [lo, hi]", path)
        lo, hi = (_number(u, path) for u in v)
        if not lo <= hi:
            _fail("interval needs lo <= hi", path)
        return [lo, hi]
    if k == "floats":
        if not isinstance(v, list) or not v:
            _fail("expected a nonempty list of numbers", path)
        out = [_number(u, path) for u in v]
        if not all(math.isfinite(u) for u in out):
            _fail("values must be finite", path)
        return out
    if k == "driver":
        if not isinstance(v, dict):
            _fail("expected a table", path)
        return _table(v, DRIVER_SCHEMA, path)
    if k == "atoms":
        return _table(v, {"locations": Field("floats"), "masses": Field("floats")}, path) if _is_table(v, path) else None
    if k == "stable":
        if _is_table(v, path):
            out = _table(v, {"alpha": Field("posfloat"), "scale": Field("posfloat", 1.0)}, path)
            if not out["alpha"] < 2:
                _fail("alpha must lie in (0, 2)", path + ("alpha",))
            return out
    raise AssertionError(k)


def _is_table(v, path) -> bool:
    if not isinstance(v, dict):
        _fail("expected a table", path)
    return True


def _table(raw: dict, schema: dict, path: tuple) -> dict:
    for key in raw:
        if key not in schema:
            _fail(f"unknown key {key!r} (allowed: {', '.join(schema)})", path + (key,))
    out = {}
    for key, f in schema.items():
        if key in raw:
            out[key] = _check_value(f, raw[key], path + (key,))
        elif f.default is REQUIRED:
            _fail(f"missing required key {key!r}", path + (key,))
        elif f.default is not None:
            default = f.default
            out[key] = _check_value(f, default, path + (key,)) if f.kind == "driver" else copy.deepcopy(default)
    return out


def _kind_table(raw, schemas: dict, name: str) -> dict:
    if not isinstance(raw, dict):
        _fail("expected a table", (name,))
    if "kind" not in raw:
        _fail("missing required key 'kind'", (name, "kind"))
    kind = raw["kind"]
    if kind not in schemas:
        _fail(f"kind must be one of {', '.join(schemas)}, got {kind!r}", (name, "kind"))
    body = {k: v for k, v in raw.items() if k != "kind"}
    return {"kind": kind, **_table(body, schemas[kind], (name,))}


def _cross_checks(doc: dict):
    proc, meas = doc["process"], doc["measure"]
    if doc["grid"]["xi_min"] > doc["grid"]["xi_max"]:
        _fail("xi_min must not exceed xi_max", ("grid", "xi_min"))
    if not all(math.isfinite(doc["grid"][k]) for k in ("xi_min", "xi_max")):
        _fail("grid bounds must be finite", ("grid",))
    if meas["kind"] == "density" and not all(math.isfinite(s) for s in meas["support"]):
        _fail("density support must be finite", ("measure", "support"))
    if proc["kind"] == "diffusion1d":
        lo, hi = proc["support"]
        if not lo < hi or not lo <= proc["x0"] <= hi:
            _fail("need lo < hi and x0 inside the support", ("process", "support"))
    for name in ("mean", "variance"):
        if not all(math.isfinite(u) for u in doc["fit"][name]):
            _fail("fit bounds must be finite", ("fit", name))
    st = doc["stationary"]
    if ("x_min" in st) != ("x_max" in st):
        _fail("give both x_min and x_max or neither", ("stationary",))
    if "x_min" in st and not st["x_min"] < st["x_max"]:
        _fail("x_min must be below x_max", ("stationary", "x_min"))


def normalize(raw: dict, base_dir: str = ".") -> dict:
    """Validate a parsed TOML mapping into the normalized document."""
    for key in raw:
        if key not in TOP_LEVEL:
            _fail(f"unknown table {key!r} (allowed: {', '.join(TOP_LEVEL)})", (key,))
    for key in ("process", "measure"):
        if key not in raw:
            _fail(f"missing required table [{key}]", ())
    doc = {"process": _kind_table(raw["process"], PROCESS_SCHEMA, "process"),
           "measure": _kind_table(raw["measure"], MEASURE_SCHEMA, "measure")}
    for name, schema in TABLES.items():
        sub = raw.get(name, {})
        if not isinstance(sub, dict):
            _fail("expected a table", (name,))
        doc[name] = _table(sub, schema, (name,))
    if doc["measure"]["kind"] == "samples":
        doc["measure"]["file"] = os.path.abspath(os.path.join(base_dir, doc["measure"]["file"]))
    _cross_checks(doc)
    return doc


def loads(text: str, base_dir: str = ".") -> dict:
    """Parse and validate TOML text; errors carry line and column."""
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"\(at line (\d+), column (\d+)\)", str(exc))
        msg = re.sub(r"\s*\(at line.*\)", "", str(exc))
        raise SpecError(f"malformed TOML: {msg}", (), *(map(int, m.groups()) if m else (None, None))) from None
    try:
        return normalize(raw, base_dir)
    except SpecError as err:
        offset = getattr(err, "expr_position", None)
        # +1 skips the opening quote of the string
        raise err.locate(text, 0 if offset is None else offset + 1) from None


def load(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc.strerror}", ()) from None
    except UnicodeDecodeError:
        raise SpecError("spec file is not valid UTF-8", ()) from None
    return loads(text, os.path.dirname(os.path.abspath(path)))


def dumps(doc: dict) -> str:
    """TOML text of a normalized document (round-trips through :func:`loads`)."""
    return tomli_w.dumps(_toml_safe(doc))


def _toml_safe(v):
    # TOML has inf but tomli_w needs plain floats; nothing else to adjust
    if isinstance(v, dict):
        return {k: _toml_safe(u) for k, u in v.items()}
    if isinstance(v, list):
        return [_toml_safe(u) for u in v]
    return v


# ---------------------------------------------------------------------------
# building engine objects

@dataclass
class Built:
    """Engine objects for one normalized document."""

    doc: dict
    symbol: Symbol
    measure: Optional[object] = None
    sde: Optional[SDESpec] = None
    diffusion: Optional[Diffusion1D] = None
    notes: list = field(default_factory=list)

    @property
    def paper_mode(self) -> bool:
        return self.doc["mode"]["convention"] == "paper"

    @property
    def grid(self) -> np.ndarray:
        g = self.doc["grid"]
        return np.linspace(g["xi_min"], g["xi_max"], g["n"])


def triplet(d: Optional[dict], gauss_factor: float = 1.0) -> LevyTriplet:
    """Lévy triplet from a driver table; ``gauss_factor`` scales ``q``."""
    if d is None:
        return LevyTriplet.zero(1)
    jumps = None
    if d.get("atoms") is not None and d.get("stable") is not None:
        raise InputError("a driver takes either atoms or stable jumps, not both")
    if d.get("atoms") is not None:
        jumps = Atoms(d["atoms"]["locations"], d["atoms"]["masses"])
    elif d.get("stable") is not None:
        jumps = StableSymmetric(d["stable"]["alpha"], d["stable"]["scale"], 1)
    return LevyTriplet([d["ell"]], [[gauss_factor * d["q"]]], jumps)


def _coef(src: Optional[str]) -> Optional[Coefficient]:
    return None if src is None else to_coefficient(Expression(src))


def _scaled(c: Coefficient, factor: float) -> Coefficient:
    if factor == 1.0:
        return c
    if c.poly is not None:
        return Coefficient.constant(factor * c.poly.coef[0]) if c.is_constant else Coefficient.polynomial(factor * c.poly)
    return Coefficient(lambda x: factor * c.fn(x), 1, (), vectorized=True)


def _measure(m: dict):
    kind = m["kind"]
    if kind == "gaussian":
        return GaussianParam(m["mean"], m["variance"])
    if kind == "dirac":
        return DiracAt(m["mean"])
    if kind == "samples":
        return Samples.from_csv(m["file"])
    return Density(Expression(m["density"]), m["support"], normalize=m["normalize"])


def build(doc: dict, with_measure: bool = True) -> Built:
    """Symbol, measure and (where defined) SDE / diffusion for a document.

    Paper convention doubles every Gaussian covariance, so that the symbol's
    Gaussian term reads ``xi'Q xi`` and simulations follow that symbol.
    """
    p = doc["process"]
    kind = p["kind"]
    g = 2.0 if doc["mode"]["convention"] == "paper" else 1.0
    rt = math.sqrt(g)
    sde = diffusion = None
    notes = []
    if kind == "levy":
        drv = triplet(p["driver"], g)
        sym = levy_symbol(drv)
        sde = SDESpec(phi=1.0, driver=drv)
    elif kind == "ou":
        lam, sigma = p["lambda"], p["sigma"]
        sym = symbol_diffusion(lam, sigma, paper_mode=g == 2.0)
        sde = SDESpec(a=lam, phi=rt * sigma, driver=LevyTriplet.brownian(1.0))
        diffusion = Diffusion1D(lambda x: -lam * x, lambda x: rt * sigma + 0 * x)
    elif kind == "sde":
        drv = triplet(p["driver"], g)
        drv_z = triplet(p["driver_z"], g) if "driver_z" in p else None
        phi = _coef(p["phi"])
        beta = _coef(p.get("b_drift"))
        sde = SDESpec(a=p["a"], phi=phi, driver=drv, b=p["b"], driver_z=drv_z, beta=beta)
        if beta is None and drv_z is None:
            sym = symbol_ou_type(p["a"], phi, drv)
        elif beta is None and p["a"] == 0:
            sym = symbol_additive(p["b"], phi, drv, drv_z)
        else:
            sym = sde.symbol()
        notes.append("Phi is given by an expression and is not declared bounded; "
                     "boundedness is a hypothesis of the criterion")
    elif kind == "additive":
        drv_l, drv_z = triplet(p["driver_l"], g), triplet(p["driver_z"], g)
        phi = _coef(p["phi"])
        sym = symbol_additive(p["b"], phi, drv_l, drv_z)
        sde = SDESpec(phi=phi, driver=drv_l, b=p["b"], driver_z=drv_z)
        notes.append("Phi is given by an expression and is not declared bounded; "
                     "boundedness is a hypothesis of the criterion")
    elif kind == "diffusion1d":
        b, sigma = Expression(p["b_drift"]), Expression(p["sigma"])
        bc, sc = to_coefficient(b), _scaled(to_coefficient(sigma), rt)
        q = (Coefficient.polynomial(sc.poly ** 2) if not sc.is_constant else Coefficient.constant(sc.poly.coef[0] ** 2)) \
            if sc.poly is not None else Coefficient(lambda x: (rt * sigma(x)) ** 2, 1, (), vectorized=True)
        sym = symbol_from_characteristics(DifferentialCharacteristics(bc, q, None, 1, vectorized=True))
        sde = SDESpec(phi=sc, driver=LevyTriplet.brownian(1.0), beta=bc)
        diffusion = Diffusion1D(b, lambda x: rt * sigma(x), p["x0"], tuple(p["support"]))
    elif kind == "gou":
        du, dl = triplet(p["driver_u"], g), triplet(p["driver_l"], g)
        sym = symbol_gou(du, dl)
        sde = SDESpec(phi=Coefficient.polynomial([0.0, 1.0]), driver=du, b=1.0, driver_z=dl)
    else:
        ell, q = _coef(p["ell"]), _coef(p["q"])
        q = _scaled(q, g)
        jumps = triplet(p["jumps"]).jumps if "jumps" in p else None
        if "jumps" in p and (p["jumps"]["ell"] != 0 or p["jumps"]["q"] != 0):
            raise SpecError("the jumps table takes atoms or stable only", ("process", "jumps"))
        sym = symbol_from_characteristics(DifferentialCharacteristics(ell, q, jumps, 1, vectorized=True))
    mu = _measure(doc["measure"]) if with_measure else None
    return Built(doc, sym, mu, sde, diffusion, notes)
