"""Manifold charts: metric data with exact symbolic partials, the lowered
1-form of the unit field, and deterministic point/frame sampling.

Index conventions used package-wide:

* metric components ``g[i][j]`` carry two lower indices,
* the distinguished field ``xi`` carries an upper index,
* every derivative axis is prepended, so ``dG[m, i, j] = d_m g_ij`` and
  ``d2G[p, m, i, j] = d_p d_m g_ij``.

The 1-form is always derived by lowering (``pi_i = g_ij xi^j``); it is never
independent input, which keeps chart files consistent by construction.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import expr as ex

__all__ = [
    "SpecError",
    "NotSPDError",
    "GateError",
    "DimensionError",
    "ManifoldSpec",
    "MetricValue",
    "CovectorValue",
    "SampleSet",
    "load_spec",
    "spec_to_text",
    "metric_at",
    "pi_at",
    "sample",
    "in_box",
]


class SpecError(Exception):
    """A manifold document is malformed or inconsistent."""


class NotSPDError(Exception):
    """The metric failed the positive-definiteness factorization at a point."""


class GateError(Exception):
    """An operation requiring a parallel unit field was invoked on a chart
    that declares the field non-parallel."""


class DimensionError(Exception):
    """An operation requiring dimension > 2 was invoked on a planar chart."""


# ---------------------------------------------------------------------------
# spec + symbolic derivative tables


class ChartTables:
    """Per-spec cache of symbolically differentiated component tables.

    Tables are object arrays of Expr; the table of order k has shape
    (n,)*k + base_shape with derivative axes first.  Building is idempotent,
    so concurrent lazy fills at worst recompute.
    """

    def __init__(self, spec: "ManifoldSpec"):
        self.coords = spec.coords
        n = len(spec.coords)
        g = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                g[i, j] = spec.g[i][j]
        xi = np.empty((n,), dtype=object)
        for i in range(n):
            xi[i] = spec.xi[i]
        pi = np.empty((n,), dtype=object)
        for i in range(n):
            acc = ex.const(0.0)
            for j in range(n):
                acc = ex.add(acc, ex.mul(g[i, j], xi[j]))
            pi[i] = acc
        self._base = {"g": g, "xi": xi, "pi": pi}
        if spec.phi is not None:
            phi = np.empty((n, n), dtype=object)
            for i in range(n):
                for j in range(n):
                    phi[i, j] = spec.phi[i][j]
            self._base["phi"] = phi
        self._cache: dict[tuple[str, int], np.ndarray] = {}
        self._eval_plans: dict[tuple[str, int], tuple[np.ndarray, list]] = {}

    def table(self, name: str, order: int) -> np.ndarray:
        if order == 0:
            return self._base[name]
        key = (name, order)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        prev = self.table(name, order - 1)
        n = len(self.coords)
        out = np.empty((n,) + prev.shape, dtype=object)
        for m, coord in enumerate(self.coords):
            for idx in np.ndindex(prev.shape):
                out[(m,) + idx] = ex.diff(prev[idx], coord)
        self._cache[key] = out
        return out

    def values(self, name: str, order: int, env: dict) -> np.ndarray:
        # Constant entries dominate these tables (derivative tables of flat
        # charts are entirely constant), so they are baked into a template
        # once and only the genuinely varying entries are walked per point.
        key = (name, order)
        plan = self._eval_plans.get(key)
        if plan is None:
            table = self.table(name, order)
            template = np.zeros(table.shape, dtype=float)
            varying = []
            flat = table.reshape(-1)
            for k in range(flat.size):
                tree = flat[k]
                if isinstance(tree, ex.Const):
                    template.flat[k] = tree.value
                else:
                    varying.append((k, tree))
            plan = (template, varying)
            self._eval_plans[key] = plan
        template, varying = plan
        out = template.copy()
        for k, tree in varying:
            out.flat[k] = ex.evaluate(tree, env)
        return out


@dataclass
class ManifoldSpec:
    """A coordinate chart: metric, distinguished field, sampling box.

    ``phi`` is an optional (1,1) tensor with ``phi[i][j]`` the i-th component
    of the image of the j-th coordinate field; f1, f2, f3 are the optional
    curvature coefficient functions that accompany it.
    """

    name: str
    coords: tuple[str, ...]
    g: tuple[tuple[ex.Expr, ...], ...]
    xi: tuple[ex.Expr, ...]
    box: tuple[tuple[float, float], ...]
    parallel_xi_expected: bool = True
    phi: tuple[tuple[ex.Expr, ...], ...] | None = None
    f1: ex.Expr | None = None
    f2: ex.Expr | None = None
    f3: ex.Expr | None = None
    _tables: ChartTables | None = field(
        default=None, compare=False, repr=False
    )

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def tables(self) -> ChartTables:
        if self._tables is None:
            self._tables = ChartTables(self)
        return self._tables

    def env(self, point) -> dict:
        if len(point) != self.n:
            raise SpecError(
                f"point has {len(point)} coordinates, chart has {self.n}"
            )
        return dict(zip(self.coords, (float(x) for x in point)))

    def require_dimension_above_two(self):
        if self.n <= 2:
            raise DimensionError(
                f"operation requires dimension > 2, chart {self.name!r} has n={self.n}"
            )


@dataclass
class MetricValue:
    """Metric data at a point; derivative arrays present up to the order asked."""

    point: tuple[float, ...]
    G: np.ndarray
    G_inv: np.ndarray
    dG: np.ndarray
    d2G: np.ndarray | None = None
    d3G: np.ndarray | None = None


@dataclass
class CovectorValue:
    components: np.ndarray
    unit_residual: float


@dataclass
class SampleSet:
    """Deterministic points and tangent frames; same seed, same bits."""

    seed: int
    points: np.ndarray  # (count, n)
    frames: np.ndarray  # (count, 4, n)

    @property
    def count(self) -> int:
        return self.points.shape[0]


# ---------------------------------------------------------------------------
# loading


_INDEXED_2 = re.compile(r"^(g|phi)\[(\d+)\]\[(\d+)\]$")
_INDEXED_1 = re.compile(r"^(xi|box)\[(\d+)\]$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def _parse_expr(text: str, context: str) -> ex.Expr:
    try:
        return ex.parse(text)
    except ex.ParseError as err:
        raise SpecError(f"{context}: {err}") from err


def _parse_kv_document(text: str) -> dict:
    doc: dict = {"g": {}, "xi": {}, "phi": {}, "box": {}}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        m2 = _INDEXED_2.match(key)
        m1 = _INDEXED_1.match(key)
        if m2:
            doc[m2.group(1)][(int(m2.group(2)), int(m2.group(3)))] = value
        elif m1:
            doc[m1.group(1)][int(m1.group(2))] = value
        elif key in ("dim", "coords", "name", "parallel_xi_expected", "f1", "f2", "f3"):
            if key in doc:
                raise SpecError(f"line {lineno}: duplicate key {key!r}")
            doc[key] = value
        else:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
    return doc


def _parse_json_document(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecError(f"invalid JSON document: {err}") from err
    if not isinstance(data, dict):
        raise SpecError("JSON document must be an object")
    doc: dict = {"g": {}, "xi": {}, "phi": {}, "box": {}}
    for key in ("dim", "name", "parallel_xi_expected", "f1", "f2", "f3", "coords"):
        if key in data:
            doc[key] = data[key]
    if "g" in data:
        for i, row in enumerate(data["g"]):
            for j, entry in enumerate(row):
                if entry is not None:
                    doc["g"][(i, j)] = str(entry)
    if "phi" in data:
        for i, row in enumerate(data["phi"]):
            for j, entry in enumerate(row):
                doc["phi"][(i, j)] = str(entry)
    if "xi" in data:
        for i, entry in enumerate(data["xi"]):
            doc["xi"][i] = str(entry)
    if "box" in data:
        for i, pair in enumerate(data["box"]):
            doc["box"][i] = f"{pair[0]}, {pair[1]}"
    return doc


def _build_spec(doc: dict) -> ManifoldSpec:
    if "dim" not in doc:
        raise SpecError("missing required key 'dim'")
    if "coords" not in doc:
        raise SpecError("missing required key 'coords'")
    try:
        n = int(doc["dim"])
    except (TypeError, ValueError):
        raise SpecError("'dim' must be an integer") from None
    if n < 2:
        raise SpecError("'dim' must be at least 2")

    coords_raw = doc["coords"]
    if isinstance(coords_raw, str):
        coords = tuple(c.strip() for c in coords_raw.split(","))
    else:
        coords = tuple(str(c) for c in coords_raw)
    if len(coords) != n:
        raise SpecError(f"dim={n} but coords lists {len(coords)} names")
    for c in coords:
        if not _IDENT.match(c):
            raise SpecError(f"invalid coordinate name {c!r}")
        if c in ex.FUNCTIONS:
            raise SpecError(f"coordinate name {c!r} shadows a function")
    if len(set(coords)) != n:
        raise SpecError("duplicate coordinate names")

    def check_vars(tree: ex.Expr, context: str):
        unknown = ex.variables(tree) - set(coords)
        if unknown:
            raise SpecError(
                f"{context} uses unknown coordinate(s) {sorted(unknown)}"
            )
        return tree

    g_entries = doc.get("g", {})
    for (i, j) in g_entries:
        if not (0 <= i < n and 0 <= j < n):
            raise SpecError(f"metric index g[{i}][{j}] outside dimension {n}")
    g_rows: list[list[ex.Expr | None]] = [[None] * n for _ in range(n)]
    for (i, j), text in g_entries.items():
        g_rows[i][j] = check_vars(_parse_expr(text, f"g[{i}][{j}]"), f"g[{i}][{j}]")
    for i in range(n):
        for j in range(i, n):
            upper, lower = g_rows[i][j], g_rows[j][i]
            if upper is None and lower is None:
                raise SpecError(f"missing metric entry g[{i}][{j}]")
            if upper is None:
                g_rows[i][j] = lower
            elif lower is None:
                g_rows[j][i] = upper
            elif upper != lower:
                raise SpecError(
                    f"g[{i}][{j}] and g[{j}][{i}] are structurally different"
                )
    g = tuple(tuple(row) for row in g_rows)

    xi_entries = doc.get("xi", {})
    if set(xi_entries) != set(range(n)):
        raise SpecError(f"xi must provide exactly indices 0..{n - 1}")
    xi = tuple(
        check_vars(_parse_expr(xi_entries[i], f"xi[{i}]"), f"xi[{i}]")
        for i in range(n)
    )

    box_entries = doc.get("box", {})
    if set(box_entries) != set(range(n)):
        raise SpecError(f"box must provide exactly indices 0..{n - 1}")
    box = []
    for i in range(n):
        parts = [p.strip() for p in str(box_entries[i]).split(",")]
        if len(parts) != 2:
            raise SpecError(f"box[{i}] must be 'lo, hi'")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise SpecError(f"box[{i}] bounds must be numbers") from None
        box.append((lo, hi))

    phi_entries = doc.get("phi", {})
    phi = None
    if phi_entries:
        if set(phi_entries) != {(i, j) for i in range(n) for j in range(n)}:
            raise SpecError("phi must provide all n*n entries when present")
        phi = tuple(
            tuple(
                check_vars(
                    _parse_expr(phi_entries[(i, j)], f"phi[{i}][{j}]"),
                    f"phi[{i}][{j}]",
                )
                for j in range(n)
            )
            for i in range(n)
        )

    fs = {}
    for key in ("f1", "f2", "f3"):
        if doc.get(key) is not None:
            fs[key] = check_vars(_parse_expr(str(doc[key]), key), key)
        else:
            fs[key] = None

    parallel_raw = doc.get("parallel_xi_expected", True)
    if isinstance(parallel_raw, str):
        if parallel_raw.lower() not in ("true", "false"):
            raise SpecError("parallel_xi_expected must be true or false")
        parallel = parallel_raw.lower() == "true"
    else:
        parallel = bool(parallel_raw)

    return ManifoldSpec(
        name=str(doc.get("name", "unnamed")),
        coords=coords,
        g=g,
        xi=xi,
        box=tuple(box),
        parallel_xi_expected=parallel,
        phi=phi,
        f1=fs["f1"],
        f2=fs["f2"],
        f3=fs["f3"],
    )


def load_spec(document: str | Path) -> ManifoldSpec:
    """Load a manifold document.

    Accepts a path, or the document text itself (key/value or JSON form).
    A plain string is treated as text when it contains a newline or '=';
    otherwise it names a file.
    """
    if isinstance(document, Path):
        text = document.read_text(encoding="utf-8")
    elif "\n" in document or "=" in document or document.lstrip().startswith("{"):
        text = document
    else:
        path = Path(document)
        if not path.exists():
            raise SpecError(f"manifold file not found: {document}")
        text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return _build_spec(_parse_json_document(text))
    return _build_spec(_parse_kv_document(text))


def _format_float(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def spec_to_text(spec: ManifoldSpec) -> str:
    """Deterministic key/value rendering; load_spec(spec_to_text(s)) == s."""
    lines = [
        f"name = {spec.name}",
        f"dim = {spec.n}",
        f"coords = {', '.join(spec.coords)}",
        f"parallel_xi_expected = {'true' if spec.parallel_xi_expected else 'false'}",
    ]
    for i in range(spec.n):
        for j in range(i, spec.n):
            lines.append(f"g[{i}][{j}] = {ex.to_text(spec.g[i][j])}")
    for i in range(spec.n):
        lines.append(f"xi[{i}] = {ex.to_text(spec.xi[i])}")
    for i, (lo, hi) in enumerate(spec.box):
        lines.append(f"box[{i}] = {_format_float(lo)}, {_format_float(hi)}")
    if spec.phi is not None:
        for i in range(spec.n):
            for j in range(spec.n):
                lines.append(f"phi[{i}][{j}] = {ex.to_text(spec.phi[i][j])}")
    for key, tree in (("f1", spec.f1), ("f2", spec.f2), ("f3", spec.f3)):
        if tree is not None:
            lines.append(f"{key} = {ex.to_text(tree)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# evaluation at points


def metric_at(spec: ManifoldSpec, point, order: int = 1) -> MetricValue:
    """Evaluate the metric and its first `order` coordinate derivative arrays.

    Positive definiteness is certified by a Cholesky factorization at the
    point; symbolic partials guarantee the derivative arrays are exact up to
    rounding in the final arithmetic.
    """
    env = spec.env(point)
    tables = spec.tables
    G = tables.values("g", 0, env)
    asym = float(np.max(np.abs(G - G.T)))
    if asym > 1e-12 * (1.0 + float(np.max(np.abs(G)))):
        raise SpecError(f"metric is not symmetric at {tuple(point)} (defect {asym:.3e})")
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise NotSPDError(
            f"metric is not positive definite at {tuple(point)}"
        ) from None
    G_inv = np.linalg.inv(G)
    dG = tables.values("g", 1, env)
    d2G = tables.values("g", 2, env) if order >= 2 else None
    d3G = tables.values("g", 3, env) if order >= 3 else None
    return MetricValue(tuple(float(x) for x in point), G, G_inv, dG, d2G, d3G)


def pi_at(spec: ManifoldSpec, point) -> CovectorValue:
    """Lower xi with the metric; report |<pi, xi> - 1| as the unit residual."""
    env = spec.env(point)
    G = metric_at(spec, point, order=0).G
    xi = spec.tables.values("xi", 0, env)
    pi = G @ xi
    return CovectorValue(pi, abs(float(pi @ xi) - 1.0))


def xi_at(spec: ManifoldSpec, point) -> np.ndarray:
    return spec.tables.values("xi", 0, spec.env(point))


def in_box(spec: ManifoldSpec, point, tol: float = 1e-12) -> bool:
    if len(point) != spec.n:
        return False
    return all(
        lo - tol <= float(x) <= hi + tol
        for x, (lo, hi) in zip(point, spec.box)
    )


def sample(spec: ManifoldSpec, count: int, seed: int) -> SampleSet:
    """Uniform points in the box with 4 tangent vectors per point.

    Vector components are uniform in [-1, 1]; a vector is redrawn while its
    Euclidean norm is below 1e-3.  The draw order is fixed (point, then its
    four vectors), so a seed reproduces the set bit-for-bit.
    """
    if count < 1:
        raise ValueError("sample count must be at least 1")
    for i, (lo, hi) in enumerate(spec.box):
        if not lo < hi:
            raise ValueError(f"empty sampling box for coordinate {spec.coords[i]!r}")
    rng = np.random.default_rng(seed)
    n = spec.n
    lows = np.array([lo for lo, _ in spec.box])
    highs = np.array([hi for _, hi in spec.box])
    points = np.empty((count, n))
    frames = np.empty((count, 4, n))
    for s in range(count):
        points[s] = rng.uniform(lows, highs)
        for v in range(4):
            vec = rng.uniform(-1.0, 1.0, size=n)
            while float(np.linalg.norm(vec)) < 1e-3:
                vec = rng.uniform(-1.0, 1.0, size=n)
            frames[s, v] = vec
    return SampleSet(seed=seed, points=points, frames=frames)
