"""Metric charts: parsing chart documents and evaluating g, dg, ddg at a point.

Chart document format (TOML)::

    coords = ["r", "x", "y", "z"]
    signature = "riemannian"        # or "lorentzian"
    orientation = 1                 # or -1
    domain = "x > 0"                # free text, optional

    [metric]
    g_rr = "(2*x)^3"
    g_xx = "1"
    g_yy = "(2*x)^(-3)"
    g_zz = "1"

Off-diagonal entries may be written in either index order and default to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import expr as ex
from .bivector import check_kind
from .errors import ChartSyntaxError, ContractViolation, EvaluationDomainError
from .jets import JetOps, seed

DET_FLOOR = 1e-12


@dataclass(frozen=True)
class MetricChart:
    """Four coordinates and the ten independent coefficient expressions of g.

    ``components`` maps index pairs ``(i, j)`` with ``i <= j`` to expressions.
    """

    coords: tuple
    signature: str
    components: dict = field(hash=False)
    orientation: int = 1
    domain: str = ""
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) != 4 or len(set(self.coords)) != 4:
            raise ChartSyntaxError(f"a chart needs 4 distinct coordinate names, got {list(self.coords)}")
        check_kind(self.signature)
        if self.orientation not in (1, -1):
            raise ChartSyntaxError(f"orientation must be 1 or -1, got {self.orientation!r}")
        comps = {}
        for i in range(4):
            for j in range(i, 4):
                comps[(i, j)] = self.components.get((i, j), ex.Num(0.0))
        object.__setattr__(self, "components", comps)

    def component(self, i, j):
        return self.components[(min(i, j), max(i, j))]

    def to_text(self) -> str:
        """Render as a chart document."""
        lines = [
            "coords = [" + ", ".join(f'"{c}"' for c in self.coords) + "]",
            f'signature = "{self.signature}"',
            f"orientation = {self.orientation}",
        ]
        if self.domain:
            lines.append(f'domain = "{self.domain}"')
        lines += ["", "[metric]"]
        for (i, j), e in self.components.items():
            if i == j or not ex.is_zero(e):
                lines.append(f'g_{self.coords[i]}{self.coords[j]} = "{ex.to_text(e)}"')
        return "\n".join(lines) + "\n"


def chart_from_strings(coords, signature, entries: dict, orientation=1, domain="", name="") -> MetricChart:
    """Build a chart from ``{(i, j): "expression"}``; diagonal entries are required."""
    comps = {}
    for (i, j), text in entries.items():
        a, b = min(i, j), max(i, j)
        if (a, b) in comps:
            raise ChartSyntaxError(f"component g_{coords[a]}{coords[b]} given twice")
        comps[(a, b)] = ex.parse_expr(text, coords)
    for i in range(4):
        if (i, i) not in comps:
            raise ChartSyntaxError(f"missing diagonal component g_{coords[i]}{coords[i]}")
    return MetricChart(tuple(coords), signature, comps, orientation, domain, name)


def _split_key(key, coords):
    if not key.startswith("g_"):
        return None
    rest = key[2:]
    for a, ca in enumerate(coords):
        if rest.startswith(ca):
            for b, cb in enumerate(coords):
                if rest[len(ca):] == cb:
                    return a, b
    return None


def parse_metric(text: str, name: str = "") -> MetricChart:
    """Parse a chart document (see module docstring)."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        raise ChartSyntaxError(f"malformed chart document: {exc}", line, col) from None
    for key in ("coords", "signature", "metric"):
        if key not in doc:
            raise ChartSyntaxError(f"chart document lacks required field {key!r}")
    coords = doc["coords"]
    if not isinstance(coords, list) or len(coords) != 4 or not all(isinstance(c, str) for c in coords):
        raise ChartSyntaxError(f"coords must list exactly 4 names, got {coords!r}")
    for c in coords:
        if not c.isidentifier() or c in ex.FUNCTIONS:
            raise ChartSyntaxError(f"invalid coordinate name {c!r}")
    signature = doc["signature"]
    if signature not in ("riemannian", "lorentzian"):
        raise ChartSyntaxError(f"signature must be 'riemannian' or 'lorentzian', got {signature!r}")
    orientation = doc.get("orientation", 1)
    if orientation not in (1, -1) or isinstance(orientation, bool):
        raise ChartSyntaxError(f"orientation must be 1 or -1, got {orientation!r}")
    metric = doc["metric"]
    if not isinstance(metric, dict):
        raise ChartSyntaxError("[metric] must be a table")
    lines = text.splitlines()
    entries = {}
    for key, value in metric.items():
        idx = _split_key(key, coords)
        if idx is None:
            raise ChartSyntaxError(f"unknown metric entry {key!r}")
        if isinstance(value, bool) or not isinstance(value, (str, int, float)):
            raise ChartSyntaxError(f"metric entry {key!r} must be a string or number")
        line = next((n + 1 for n, ln in enumerate(lines) if ln.strip().startswith(key)), None)
        a, b = min(idx), max(idx)
        if (a, b) in entries:
            raise ChartSyntaxError(f"component {key!r} given twice", line, 1)
        try:
            entries[(a, b)] = ex.parse_expr(str(value), coords, line)
        except ChartSyntaxError as err:
            raise ChartSyntaxError(f"in {key}: {err}") from None
    for i in range(4):
        if (i, i) not in entries:
            raise ChartSyntaxError(f"missing diagonal component g_{coords[i]}{coords[i]}")
    return MetricChart(tuple(coords), signature, entries, orientation, doc.get("domain", ""), name)


def load_chart(path) -> MetricChart:
    with open(path, encoding="utf-8") as fh:
        return parse_metric(fh.read(), name=str(path))


def _env(chart, point):
    point = np.asarray(point, dtype=float)
    if point.shape != (4,):
        raise ContractViolation(f"a point needs 4 coordinates, got shape {point.shape}")
    return dict(zip(chart.coords, seed(point)))


def _pt(point):
    return "(" + ", ".join(f"{float(v):g}" for v in np.ravel(point)) + ")"


def signature_mismatch(g, kind) -> bool:
    neg = int(np.sum(np.linalg.eigvalsh(g) < 0))
    return neg != (0 if kind == "riemannian" else 1)


def metric_jets(chart: MetricChart, point, check=True):
    """``(g, dg, ddg)`` at ``point`` with ``dg[k, i, j] = d_k g_ij`` and ``ddg[k, l, i, j] = d_k d_l g_ij``."""
    env = _env(chart, point)
    g = np.empty((4, 4))
    dg = np.empty((4, 4, 4))
    ddg = np.empty((4, 4, 4, 4))
    for (i, j), e in chart.components.items():
        jet = ex.evaluate(e, env, JetOps)
        if not math.isfinite(jet.value):
            raise EvaluationDomainError(f"g_{chart.coords[i]}{chart.coords[j]} is not finite at {_pt(point)}")
        for a, b in {(i, j), (j, i)}:
            g[a, b] = jet.value
            dg[:, a, b] = jet.grad
            ddg[:, :, a, b] = jet.hess
    if check:
        if abs(np.linalg.det(g)) < DET_FLOOR:
            raise EvaluationDomainError(f"metric is degenerate at {_pt(point)}")
        if signature_mismatch(g, chart.signature):
            raise EvaluationDomainError(f"metric does not have {chart.signature} signature at {_pt(point)}")
    return g, dg, ddg


def metric_at(chart: MetricChart, point, check=True) -> np.ndarray:
    return metric_jets(chart, point, check)[0]


def evaluate_vector(exprs, coords, point) -> np.ndarray:
    """Evaluate four component expressions (parsed or text) at ``point``."""
    env = dict(zip(coords, seed(point)))
    out = []
    for e in exprs:
        if isinstance(e, str):
            e = ex.parse_expr(e, coords)
        out.append(ex.evaluate(e, env, JetOps).value)
    return np.array(out)


def conformal_rescale(chart: MetricChart, f_text: str, name_suffix=" (rescaled)") -> MetricChart:
    """Chart of ``exp(2 f) g``."""
    f = ex.parse_expr(f_text, chart.coords)
    factor = ex.Call("exp", ex.mul(ex.num(2.0), f))
    comps = {k: (e if ex.is_zero(e) else ex.mul(factor, e)) for k, e in chart.components.items()}
    return MetricChart(chart.coords, chart.signature, comps, chart.orientation, chart.domain, chart.name + name_suffix)


def bridge_metric(chart: MetricChart, T_exprs, check_points=(), tol=1e-9) -> MetricChart:
    """Signature-flipped companion of ``chart`` built from the unit vector field T.

    Riemannian input gives ``g - 2 T_flat (x) T_flat``; Lorentzian input (T timelike,
    unit) gives ``g + 2 T_flat (x) T_flat``.  ``T_flat`` is lowered with the input
    metric.  Unit length is verified at every point in ``check_points``.
    """
    T = [ex.parse_expr(t, chart.coords) if isinstance(t, str) else t for t in T_exprs]
    if len(T) != 4:
        raise ContractViolation(f"T needs 4 components, got {len(T)}")
    sign = -2.0 if chart.signature == "riemannian" else 2.0
    target_norm = 1.0 if chart.signature == "riemannian" else -1.0
    for p in check_points:
        g = metric_at(chart, p)
        t = evaluate_vector(T, chart.coords, p)
        norm = float(t @ g @ t)
        if abs(norm - target_norm) > tol:
            raise ContractViolation(
                f"T must satisfy g(T, T) = {target_norm:+g}; got {norm:.12g} at {_pt(p)}",
                residual=abs(norm - target_norm),
            )
    flat = []
    for i in range(4):
        terms = [ex.mul(chart.component(i, j), T[j]) for j in range(4)
                 if not ex.is_zero(chart.component(i, j)) and not ex.is_zero(T[j])]
        acc = terms[0] if terms else ex.num(0.0)
        for t in terms[1:]:
            acc = ex.add(acc, t)
        flat.append(acc)
    comps = {}
    for (i, j), e in chart.components.items():
        if ex.is_zero(flat[i]) or ex.is_zero(flat[j]):
            comps[(i, j)] = e
        else:
            comps[(i, j)] = ex.add(e, ex.mul(ex.num(sign), ex.mul(flat[i], flat[j])))
    kind = "lorentzian" if chart.signature == "riemannian" else "riemannian"
    return MetricChart(chart.coords, kind, comps, chart.orientation, chart.domain, chart.name + " (bridged)")
