"""Builtin charts: ``flat``, ``paper-example``, ``product(c1,c2)``, ``space-form(k)``, ``lorentz-flat``."""

from __future__ import annotations

import math
import re

import numpy as np

from .chart import MetricChart, chart_from_strings
from .errors import ChartSyntaxError

BUILTIN_NAMES = ("flat", "paper-example", "product", "space-form", "lorentz-flat")


def flat() -> MetricChart:
    return chart_from_strings(("x0", "x1", "x2", "x3"), "riemannian",
                              {(i, i): "1" for i in range(4)}, name="flat")


def lorentz_flat() -> MetricChart:
    entries = {(0, 0): "-1", (1, 1): "1", (2, 2): "1", (3, 3): "1"}
    return chart_from_strings(("t", "x", "y", "z"), "lorentzian", entries, name="lorentz-flat")


def paper_example() -> MetricChart:
    """``(2x)^3 dr^2 + dx^2 + (2x)^-3 dy^2 + dz^2`` on ``x > 0``."""
    entries = {(0, 0): "(2*x)^3", (1, 1): "1", (2, 2): "(2*x)^(-3)", (3, 3): "1"}
    return chart_from_strings(("r", "x", "y", "z"), "riemannian", entries,
                              domain="x > 0", name="paper-example")


def _warp(c: float, u: str) -> str:
    """Squared warping function of a constant-curvature surface ``du^2 + s(u)^2 dv^2``."""
    if c > 0:
        k = repr(math.sqrt(c))
        return f"(sin({k}*{u})/{k})^2"
    if c < 0:
        k = repr(math.sqrt(-c))
        return f"(sinh({k}*{u})/{k})^2"
    return f"{u}^2"


def product(c1: float = 1.0, c2: float = 1.0) -> MetricChart:
    """Product of two surfaces of constant curvature ``c1`` and ``c2`` in geodesic polar coordinates."""
    entries = {(0, 0): "1", (1, 1): _warp(c1, "u1"), (2, 2): "1", (3, 3): _warp(c2, "u2")}
    return chart_from_strings(("u1", "v1", "u2", "v2"), "riemannian", entries,
                              domain="0 < u_i < pi/sqrt(c_i) when c_i > 0; u_i > 0 otherwise",
                              name=f"product({c1:g},{c2:g})")


def space_form(k: float = 1.0) -> MetricChart:
    """Constant sectional curvature ``k`` in stereographic coordinates."""
    conf = f"1/(1 + {repr(k / 4.0)}*(x0^2 + x1^2 + x2^2 + x3^2))^2"
    entries = {(i, i): conf for i in range(4)}
    return chart_from_strings(("x0", "x1", "x2", "x3"), "riemannian", entries,
                              domain="1 + k|x|^2/4 > 0", name=f"space-form({k:g})")


_CALL = re.compile(r"^\s*([a-z-]+)\s*(?:\(([^)]*)\))?\s*$")


def builtin(name: str) -> MetricChart:
    """Look up a builtin by name, e.g. ``"product(1,-0.5)"`` or ``"space-form(2)"``."""
    m = _CALL.match(name)
    if not m or m.group(1) not in BUILTIN_NAMES:
        raise ChartSyntaxError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    base, argtext = m.group(1), m.group(2)
    try:
        args = [float(a) for a in argtext.split(",")] if argtext and argtext.strip() else []
    except ValueError:
        raise ChartSyntaxError(f"bad builtin arguments in {name!r}") from None
    if base == "product":
        if len(args) not in (0, 2):
            raise ChartSyntaxError("product takes two curvatures: product(c1,c2)")
        return product(*args)
    if base == "space-form":
        if len(args) > 1:
            raise ChartSyntaxError("space-form takes one curvature: space-form(k)")
        return space_form(*args)
    if args:
        raise ChartSyntaxError(f"builtin {base!r} takes no arguments")
    return {"flat": flat, "paper-example": paper_example, "lorentz-flat": lorentz_flat}[base]()


def sample_points(chart_name: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random points inside the validity region of a builtin."""
    pts = rng.uniform(-1.0, 1.0, size=(n, 4))
    if chart_name == "paper-example":
        pts[:, 1] = rng.uniform(0.5, 4.0, size=n)
    elif chart_name.startswith("product"):
        pts[:, 0] = rng.uniform(0.3, 1.2, size=n)
        pts[:, 2] = rng.uniform(0.3, 1.2, size=n)
    elif chart_name.startswith("space-form"):
        pts *= 0.5
    return pts
