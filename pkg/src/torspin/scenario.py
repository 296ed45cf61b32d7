"""Scenario files: a sectioned ``key = value`` text format with expression values.

Sections and keys::

    [meta]          name, seed, tol_algebraic, tol_first, tol_third
    [formalism]     kind = gamma | epsilon; modulus, phase (gamma); upsilon0..3 (epsilon)
    [metric]        g00 .. g33, upper triangle (missing entries default to Minkowski)
    [torsion]       T_mu_nu_lam with mu < nu (missing entries are zero)
    [spin_torsion]  a0..a3, b0..b3, beta0..beta3, c0..c3 (missing entries are zero)
    [potentials]    phi0..phi3 (missing entries are zero)
    [gauge]         rho, theta; the section may repeat
    [points]        point = t, x, y, z (repeatable) or box_min, box_max, count, seed

Lines starting with ``#`` or ``;`` are comments.  ``configparser`` is not used
because sections must be repeatable and keys such as ``point`` may repeat.
"""

from __future__ import annotations

import dataclasses
import re
from importlib import resources
from pathlib import Path

import numpy as np

from . import expr as ex
from .errors import (ConstraintViolated, DomainError, ExprSyntaxError, NonLorentzianSignature,
                     ScenarioParseError, SingularMetric, UnknownIdentifier, ValidationError)
from .soldering import Formalism
from .spinaffinity import TorsionalSpinAffinity, upsilon_constraint_residual
from .state import DEFAULT_TOLERANCES, GaugeSpec, GeometryState, Scenario
from .worldgeom import MetricField, TorsionField, validate_metric

SECTIONS = ("meta", "formalism", "metric", "torsion", "spin_torsion", "potentials", "gauge", "points")
REPEATABLE_SECTIONS = {"gauge"}
REPEATABLE_KEYS = {("points", "point")}
MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
DEFAULT_BOX = ((-0.5,) * 4, (0.5,) * 4)
DEFAULT_COUNT = 5
UPSILON_TOL = 1e-9

_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_TORSION_KEY = re.compile(r"^T_([0-3])_([0-3])_([0-3])$")
_METRIC_KEY = re.compile(r"^g([0-3])([0-3])$")
_SPIN_KEY = re.compile(r"^(a|b|beta|c)([0-3])$")


@dataclasses.dataclass
class _Entry:
    value: str
    line: int


def parse_sections(text: str, source: str = "<string>") -> list[tuple[str, dict]]:
    """Split ``text`` into ``(section, {key: [entries]})`` blocks in file order."""
    blocks: list[tuple[str, dict]] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = _SECTION.match(line)
        if m:
            name = m.group(1).lower()
            if name not in SECTIONS:
                raise ScenarioParseError(f"{source}:{lineno}", f"unknown section [{name}]")
            if name not in REPEATABLE_SECTIONS and any(b[0] == name for b in blocks):
                raise ScenarioParseError(f"{source}:{lineno}", f"section [{name}] appears twice")
            current = (name, {})
            blocks.append(current)
            continue
        if "=" not in line:
            raise ScenarioParseError(f"{source}:{lineno}", "expected 'key = value' or '[section]'")
        if current is None:
            raise ScenarioParseError(f"{source}:{lineno}", "key outside of any section")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ScenarioParseError(f"{source}:{lineno}", "empty key or value")
        entries = current[1].setdefault(key, [])
        if entries and (current[0], key) not in REPEATABLE_KEYS:
            raise ScenarioParseError(f"{source}:{lineno}", f"duplicate key {current[0]}.{key}")
        entries.append(_Entry(value, lineno))
    return blocks


def _expr(field: str, entry: _Entry) -> ex.Expr:
    try:
        return ex.parse(entry.value)
    except (ExprSyntaxError, UnknownIdentifier) as err:
        raise ScenarioParseError(field, f"line {entry.line}: {err}") from err


def _number(field: str, entry: _Entry, kind=float):
    try:
        return kind(entry.value)
    except ValueError as err:
        raise ScenarioParseError(field, f"line {entry.line}: not a {kind.__name__}: {entry.value!r}") from err


def _vector(field: str, entry: _Entry) -> tuple:
    parts = [p.strip() for p in entry.value.split(",")]
    if len(parts) != 4:
        raise ScenarioParseError(field, f"line {entry.line}: expected 4 comma-separated numbers")
    return tuple(_number(field, _Entry(p, entry.line)) for p in parts)


def _single(section: str, keys: dict) -> dict:
    return {k: v[0] for k, v in keys.items()}


def _reject_unknown(section: str, keys, allowed):
    for k in keys:
        if k not in allowed:
            raise ScenarioParseError(f"{section}.{k}", "unknown key")


def _formalism(keys: dict) -> Formalism:
    kind = keys.get("kind", _Entry("gamma", 0)).value.lower()
    if kind == "gamma":
        _reject_unknown("formalism", keys, {"kind", "modulus", "phase"})
        mod = _expr("formalism.modulus", keys["modulus"]) if "modulus" in keys else ex.Num(1.0)
        ph = _expr("formalism.phase", keys["phase"]) if "phase" in keys else ex.Num(0.0)
        return Formalism.gamma(mod, ph)
    if kind == "epsilon":
        allowed = {"kind"} | {f"upsilon{m}" for m in range(4)}
        _reject_unknown("formalism", keys, allowed)
        ups = tuple(_expr(f"formalism.upsilon{m}", keys[f"upsilon{m}"]) if f"upsilon{m}" in keys
                    else ex.Num(0.0) for m in range(4))
        return Formalism.epsilon(ups)
    raise ScenarioParseError("formalism.kind", f"must be 'gamma' or 'epsilon', got {kind!r}")


def _metric(keys: dict) -> MetricField:
    upper = {(m, n): ex.Num(float(MINKOWSKI[m, n])) for m in range(4) for n in range(m, 4)}
    for k, e in keys.items():
        m = _METRIC_KEY.match(k)
        if not m:
            raise ScenarioParseError(f"metric.{k}", "unknown key")
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise ScenarioParseError(f"metric.{k}", "use the upper triangle (g_mn with m <= n)")
        upper[(a, b)] = _expr(f"metric.{k}", e)
    return MetricField.from_upper(upper)


def _torsion(keys: dict) -> TorsionField:
    entries = {}
    for k, e in keys.items():
        m = _TORSION_KEY.match(k)
        if not m:
            raise ScenarioParseError(f"torsion.{k}", "unknown key")
        a, b, c = (int(x) for x in m.groups())
        if a >= b:
            raise ScenarioParseError(f"torsion.{k}", "only entries with mu < nu are independent")
        entries[(a, b, c)] = _expr(f"torsion.{k}", e)
    return TorsionField(entries)


def _spin_torsion(keys: dict) -> TorsionalSpinAffinity:
    groups = {n: [ex.Num(0.0)] * 4 for n in ("a", "b", "beta", "c")}
    for k, e in keys.items():
        m = _SPIN_KEY.match(k)
        if not m:
            raise ScenarioParseError(f"spin_torsion.{k}", "unknown key")
        groups[m.group(1)][int(m.group(2))] = _expr(f"spin_torsion.{k}", e)
    return TorsionalSpinAffinity(*(tuple(groups[n]) for n in ("a", "b", "beta", "c")))


def _potentials(keys: dict) -> tuple:
    _reject_unknown("potentials", keys, {f"phi{m}" for m in range(4)})
    return tuple(_expr(f"potentials.phi{m}", keys[f"phi{m}"]) if f"phi{m}" in keys else ex.Num(0.0)
                 for m in range(4))


def _gauge(k: int, keys: dict) -> GaugeSpec:
    _reject_unknown(f"gauge[{k}]", keys, {"rho", "theta"})
    rho = _expr(f"gauge[{k}].rho", keys["rho"]) if "rho" in keys else ex.Num(1.0)
    theta = _expr(f"gauge[{k}].theta", keys["theta"]) if "theta" in keys else ex.Num(0.0)
    return GaugeSpec(rho, theta)


def sample_points(box_min, box_max, count: int, seed: int) -> tuple:
    """``count`` uniform points in the box, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(np.asarray(box_min, float), np.asarray(box_max, float), size=(count, 4))
    return tuple(tuple(float(x) for x in p) for p in pts)


@dataclasses.dataclass(frozen=True)
class PointSpec:
    explicit: tuple = ()
    box_min: tuple = DEFAULT_BOX[0]
    box_max: tuple = DEFAULT_BOX[1]
    count: int = DEFAULT_COUNT
    seed: int | None = None

    def seed_or(self, fallback: int) -> int:
        return fallback if self.seed is None else self.seed

    def resolve(self, count: int | None = None, seed: int | None = None) -> tuple:
        """Explicit points (truncated to ``count``) or a seeded sample of the box."""
        if self.explicit:
            return self.explicit if count is None else self.explicit[:count]
        n = self.count if count is None else count
        return sample_points(self.box_min, self.box_max, n, self.seed_or(0) if seed is None else seed)


def _points(keys: dict) -> PointSpec:
    _reject_unknown("points", keys, {"point", "box_min", "box_max", "count", "seed"})
    explicit = tuple(_vector("points.point", e) for e in keys.get("point", []))
    single = _single("points", {k: v for k, v in keys.items() if k != "point"})
    if explicit and single:
        raise ScenarioParseError("points", "give either explicit points or a sampling box, not both")
    spec = PointSpec(explicit=explicit)
    if "box_min" in single:
        spec = dataclasses.replace(spec, box_min=_vector("points.box_min", single["box_min"]))
    if "box_max" in single:
        spec = dataclasses.replace(spec, box_max=_vector("points.box_max", single["box_max"]))
    if "count" in single:
        spec = dataclasses.replace(spec, count=_number("points.count", single["count"], int))
    if "seed" in single:
        spec = dataclasses.replace(spec, seed=_number("points.seed", single["seed"], int))
    if any(lo >= hi for lo, hi in zip(spec.box_min, spec.box_max)):
        raise ScenarioParseError("points.box_min", "each lower bound must be below the upper bound")
    if not explicit and spec.count < 1:
        raise ScenarioParseError("points.count", "must be positive")
    return spec


def parse_scenario(text: str, source: str = "<string>", count: int | None = None,
                   seed: int | None = None, validate: bool = True) -> Scenario:
    """Parse scenario text; ``count`` and ``seed`` override the point sampling."""
    blocks = parse_sections(text, source)
    by_name = {name: keys for name, keys in blocks if name not in REPEATABLE_SECTIONS}
    meta = _single("meta", by_name.get("meta", {}))
    _reject_unknown("meta", meta, {"name", "seed", "tol_algebraic", "tol_first", "tol_third"})
    tolerances = dict(DEFAULT_TOLERANCES)
    for tier in DEFAULT_TOLERANCES:
        if f"tol_{tier}" in meta:
            tolerances[tier] = _number(f"meta.tol_{tier}", meta[f"tol_{tier}"])
    file_seed = _number("meta.seed", meta["seed"], int) if "seed" in meta else 0
    run_seed = file_seed if seed is None else seed
    point_spec = _points(by_name.get("points", {}))
    points = point_spec.resolve(count, seed if seed is not None else point_spec.seed_or(file_seed))
    gauges = tuple(_gauge(k, _single("gauge", keys))
                   for k, keys in enumerate(keys for name, keys in blocks if name == "gauge"))
    scenario = Scenario(
        name=meta["name"].value if "name" in meta else Path(source).stem,
        formalism=_formalism(_single("formalism", by_name.get("formalism", {}))),
        metric=_metric(_single("metric", by_name.get("metric", {}))),
        torsion=_torsion(_single("torsion", by_name.get("torsion", {}))),
        spin_torsion=_spin_torsion(_single("spin_torsion", by_name.get("spin_torsion", {}))),
        potentials=_potentials(_single("potentials", by_name.get("potentials", {}))),
        gauges=gauges,
        points=points,
        tolerances=tolerances,
        seed=run_seed,
    )
    if validate:
        validate_scenario(scenario)
    return scenario


def load_scenario(path, count: int | None = None, seed: int | None = None) -> Scenario:
    """Read, parse and validate a scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as err:
        raise ScenarioParseError(str(p), f"cannot read file: {err.strerror}") from err
    return parse_scenario(text, str(p), count, seed)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

COMPLEX_FIELDS = re.compile(r"^spin_torsion\.(a|c)[0-3]$")


def validate_scenario(s: Scenario):
    """Structural checks at every evaluation point.

    Raises ``ValidationError`` naming the offending field, or
    ``ConstraintViolated`` when an epsilon-formalism ``Upsilon`` fails its
    torsion constraint.
    """
    if not s.points:
        raise ValidationError("points", "no evaluation points")
    exprs = s.expressions()
    for p in s.points:
        for name, e in exprs:
            try:
                v = ex.evaluate(e, p)
            except DomainError as err:
                raise ValidationError(name, f"cannot be evaluated at {p}: {err}") from err
            if not COMPLEX_FIELDS.match(name) and abs(complex(v).imag) > 1e-12:
                raise ValidationError(name, f"must be real-valued, got {v} at {p}")
        try:
            validate_metric(np.array([[ex.evaluate(s.metric.entries[m][n], p) for n in range(4)]
                                      for m in range(4)], dtype=complex), p)
        except (SingularMetric, NonLorentzianSignature) as err:
            raise ValidationError("metric", str(err)) from err
        s.spin_torsion.validate(p)
        f = s.formalism
        if f.is_gamma and complex(ex.evaluate(f.modulus, p)).real <= 0:
            raise ValidationError("formalism.modulus", f"must be positive at {p}")
        for k, g in enumerate(s.gauges):
            if complex(ex.evaluate(g.rho, p)).real <= 0:
                raise ValidationError(f"gauge[{k}].rho", f"must be positive at {p}")
        if not f.is_gamma:
            for k, g in enumerate(s.gauges):
                if ex.coords_used(g.rho):
                    raise ValidationError(f"gauge[{k}].rho", "must be constant in the epsilon formalism")
            st = GeometryState(s, p)
            r = upsilon_constraint_residual(f.upsilon_jet(p), st.conn.torsion)
            if r > UPSILON_TOL:
                raise ConstraintViolated(f"formalism.upsilon: torsion constraint residual {r:.3e} at {p}")


def bundled_dir() -> Path:
    return Path(str(resources.files("torspin") / "scenarios"))


def bundled_scenarios() -> dict[str, Path]:
    """Name to path of every scenario shipped with the package."""
    return {p.stem: p for p in sorted(bundled_dir().glob("*.scn"))}


def resolve_path(name_or_path: str) -> Path:
    """A file path, or the name of a bundled scenario."""
    p = Path(name_or_path)
    if p.exists():
        return p
    bundled = bundled_scenarios()
    if name_or_path in bundled:
        return bundled[name_or_path]
    return p
