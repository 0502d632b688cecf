"""Problem geometry, solver settings, and JSON config ingestion.

Lengths are always in scaled units with the upper strip width fixed at pi; the
lower strip width d must satisfy 0 < d <= pi (wider lower strips are the same
problem reflected and rescaled, so they are rejected rather than silently
normalized).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ValidationError

GAP_MIN = 1e-6

_SETTINGS_KEYS = {"basis_order", "threshold_margin", "lambda_floor", "quadrature", "scan"}
_QUAD_KEYS = {"xi_max", "panel_points"}
_SCAN_KEYS = {"grid_step", "bisect_tol"}


@dataclass(frozen=True)
class WindowSpec:
    """One boundary window: the open interval |x1 - center| < half_width on x2 = 0."""

    center: float
    half_width: float

    def __post_init__(self):
        if not (math.isfinite(self.center) and math.isfinite(self.half_width)):
            raise ValidationError("window parameters must be finite")
        if self.half_width <= 0:
            raise ValidationError(f"window half_width must be positive, got {self.half_width}")

    @property
    def left(self) -> float:
        return self.center - self.half_width

    @property
    def right(self) -> float:
        return self.center + self.half_width


@dataclass(frozen=True)
class Geometry:
    """Two straight strips (widths pi above, d below) coupled through windows.

    Windows are kept sorted by center. An empty window tuple is allowed only for
    the finite-difference oracle's validation mode (a plain rectangle); the
    parser never produces it.
    """

    d: float
    windows: tuple[WindowSpec, ...]

    def __post_init__(self):
        if not (0.0 < self.d <= math.pi):
            raise ValidationError(
                f"lower strip width must satisfy 0 < d <= pi (scaling convention), got {self.d}"
            )
        ws = tuple(self.windows)
        object.__setattr__(self, "windows", ws)
        for i in range(1, len(ws)):
            if ws[i].center <= ws[i - 1].center:
                raise ValidationError("windows must have strictly increasing centers")
            gap = ws[i].left - ws[i - 1].right
            if gap < GAP_MIN:
                raise ValidationError(
                    f"windows {i - 1} and {i} overlap or touch (gap {gap:.3e} < {GAP_MIN})"
                )

    @property
    def span(self) -> tuple[float, float]:
        """Leftmost and rightmost window edge."""
        return self.windows[0].left, self.windows[-1].right


@dataclass(frozen=True)
class SolverSettings:
    basis_order: int = 32
    threshold_margin: float = 1e-6
    lambda_floor: float = 1e-2
    xi_max: float = 200.0
    panel_points: int = 24
    panel_width: float = 1.0
    grid_step: float = 2e-3
    bisect_tol: float = 1e-12

    def __post_init__(self):
        if not isinstance(self.basis_order, int) or self.basis_order < 4:
            raise ValidationError(f"basis_order must be an integer >= 4, got {self.basis_order}")
        if self.threshold_margin <= 0:
            raise ValidationError("threshold_margin must be positive")
        if self.lambda_floor < 0:
            raise ValidationError("lambda_floor must be >= 0")
        if 1.0 - self.threshold_margin <= self.lambda_floor:
            raise ValidationError("admissible band (lambda_floor, 1 - threshold_margin) is empty")
        if self.xi_max < 50.0:
            raise ValidationError("xi_max must be >= 50")
        if not isinstance(self.panel_points, int) or self.panel_points < 4:
            raise ValidationError("panel_points must be an integer >= 4")
        if self.panel_width <= 0:
            raise ValidationError("panel_width must be positive")
        if self.grid_step <= 0 or self.bisect_tol <= 0:
            raise ValidationError("scan parameters must be positive")

    @property
    def lambda_max(self) -> float:
        return 1.0 - self.threshold_margin


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ValidationError(f"unknown key(s) {sorted(unknown)} in {where}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where} must be a number, got {value!r}")
    return float(value)


def parse_settings(raw: dict) -> SolverSettings:
    _reject_unknown(raw, _SETTINGS_KEYS, "settings")
    kwargs = {}
    if "basis_order" in raw:
        n = raw["basis_order"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise ValidationError(f"basis_order must be an integer, got {n!r}")
        kwargs["basis_order"] = n
    for key in ("threshold_margin", "lambda_floor"):
        if key in raw:
            kwargs[key] = _number(raw[key], f"settings.{key}")
    quad = raw.get("quadrature", {})
    if not isinstance(quad, dict):
        raise ValidationError("settings.quadrature must be an object")
    _reject_unknown(quad, _QUAD_KEYS, "settings.quadrature")
    if "xi_max" in quad:
        kwargs["xi_max"] = _number(quad["xi_max"], "settings.quadrature.xi_max")
    if "panel_points" in quad:
        p = quad["panel_points"]
        if isinstance(p, bool) or not isinstance(p, int):
            raise ValidationError(f"panel_points must be an integer, got {p!r}")
        kwargs["panel_points"] = p
    scan = raw.get("scan", {})
    if not isinstance(scan, dict):
        raise ValidationError("settings.scan must be an object")
    _reject_unknown(scan, _SCAN_KEYS, "settings.scan")
    if "grid_step" in scan:
        kwargs["grid_step"] = _number(scan["grid_step"], "settings.scan.grid_step")
    if "bisect_tol" in scan:
        kwargs["bisect_tol"] = _number(scan["bisect_tol"], "settings.scan.bisect_tol")
    return SolverSettings(**kwargs)


def parse_problem(document) -> tuple[Geometry, SolverSettings]:
    """Parse a JSON config (text or already-loaded dict) into validated objects.

    Two-window shorthand {a_minus, a_plus, l} is normalized to explicit windows
    at centers -l and +l. Unknown keys are rejected at every level.
    """
    if isinstance(document, (str, bytes)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
    elif isinstance(document, dict):
        raw = document
    else:
        raise ValidationError(f"config must be JSON text or a mapping, got {type(document)!r}")
    if not isinstance(raw, dict):
        raise ValidationError("config root must be a JSON object")

    allowed = {"d", "windows", "a_minus", "a_plus", "l", "settings"}
    _reject_unknown(raw, allowed, "config")
    if "d" not in raw:
        raise ValidationError("config requires the lower strip width 'd'")
    d = _number(raw["d"], "d")

    shorthand = {"a_minus", "a_plus", "l"} & set(raw)
    if shorthand and "windows" in raw:
        raise ValidationError("give either 'windows' or the (a_minus, a_plus, l) shorthand, not both")
    if shorthand:
        if shorthand != {"a_minus", "a_plus", "l"}:
            raise ValidationError("shorthand requires all of a_minus, a_plus, l")
        a_minus = _number(raw["a_minus"], "a_minus")
        a_plus = _number(raw["a_plus"], "a_plus")
        l = _number(raw["l"], "l")
        windows = [WindowSpec(-l, a_minus), WindowSpec(l, a_plus)]
    else:
        if "windows" not in raw:
            raise ValidationError("config requires 'windows' or the (a_minus, a_plus, l) shorthand")
        spec = raw["windows"]
        if not isinstance(spec, list) or not 1 <= len(spec) <= 2:
            raise ValidationError("'windows' must be a list of 1 or 2 window objects")
        windows = []
        for i, item in enumerate(spec):
            if not isinstance(item, dict):
                raise ValidationError(f"windows[{i}] must be an object")
            _reject_unknown(item, {"center", "half_width"}, f"windows[{i}]")
            if "center" not in item or "half_width" not in item:
                raise ValidationError(f"windows[{i}] requires center and half_width")
            windows.append(
                WindowSpec(
                    _number(item["center"], f"windows[{i}].center"),
                    _number(item["half_width"], f"windows[{i}].half_width"),
                )
            )

    windows.sort(key=lambda w: w.center)
    geometry = Geometry(d=d, windows=tuple(windows))

    settings_raw = raw.get("settings", {})
    if not isinstance(settings_raw, dict):
        raise ValidationError("settings must be an object")
    settings = parse_settings(settings_raw)
    return geometry, settings


def serialize_problem(geometry: Geometry, settings: SolverSettings) -> dict:
    """Round-trippable document: parse_problem(serialize_problem(...)) is identity."""
    return {
        "d": geometry.d,
        "windows": [
            {"center": w.center, "half_width": w.half_width} for w in geometry.windows
        ],
        "settings": {
            "basis_order": settings.basis_order,
            "threshold_margin": settings.threshold_margin,
            "lambda_floor": settings.lambda_floor,
            "quadrature": {"xi_max": settings.xi_max, "panel_points": settings.panel_points},
            "scan": {"grid_step": settings.grid_step, "bisect_tol": settings.bisect_tol},
        },
    }
