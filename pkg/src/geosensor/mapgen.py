"""Burden choropleths overlaid with tweet dots, rendered to SVG and GeoJSON.

Each dot is one resolved tweet. Its size shrinks with the publication
output of its region, ``1 / ln(papers)``, so dots stand out where tweets
do not simply echo local research activity.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .errors import MalformedBoundaries, MissingFile

logger = logging.getLogger(__name__)

NODATA = None
NODATA_FILL = "#ffffff"
DOT_FILL = "#d7301f"
DOT_OPACITY = 0.5
STROKE = "#969696"
# light-to-dark sequential blue; other class counts interpolate between the ends
BLUES_5 = ("#eff3ff", "#bdd7e7", "#6baed6", "#3182bd", "#08519c")


def dot_weight(papers: float) -> float:
    """``1 / ln(max(papers, 2))``; counts below 2 would give ln <= 0."""
    return 1.0 / math.log(max(float(papers), 2.0))


def blue_ramp(n: int) -> tuple[str, ...]:
    if n == len(BLUES_5):
        return BLUES_5
    lo = np.array([0xEF, 0xF3, 0xFF], dtype=float)
    hi = np.array([0x08, 0x51, 0x9C], dtype=float)
    if n == 1:
        return ("#" + "".join(f"{int(round(c)):02x}" for c in lo),)
    out = []
    for i in range(n):
        rgb = lo + (hi - lo) * i / (n - 1)
        out.append("#" + "".join(f"{int(round(c)):02x}" for c in rgb))
    return tuple(out)


@dataclass(frozen=True)
class ClassedRegion:
    region_code: str
    burden: float | None
    class_index: int | None
    fill: str

    @property
    def nodata(self) -> bool:
        return self.class_index is None


@dataclass
class Classification:
    regions: list[ClassedRegion]
    breaks: list[float]  # lower bound, C-1 interior breaks, upper bound
    classes: int
    degenerate: bool = False
    warnings: list[str] = field(default_factory=list)


def classify(burdens, classes: int = 5) -> Classification:
    """Quantile classes over the regions with data; the rest become no-data.

    A value's class is the number of interior quantile breaks strictly
    below it, which keeps classes monotone in burden and puts ties in the
    same class.
    """
    if classes < 2:
        raise ValueError("need at least 2 classes")
    values = np.array([v for v in burdens.values() if v is not None], dtype=float)
    ramp = blue_ramp(classes)
    warn = []
    degenerate = False
    if len(values):
        qs = np.quantile(values, np.arange(1, classes) / classes)
        breaks = [float(values.min())] + [float(q) for q in qs] + [float(values.max())]
        if len(values) < classes:
            degenerate = True
            warn.append(f"only {len(values)} region(s) with data for {classes} classes; classes collapse")
        if len(set(breaks)) < len(breaks):
            degenerate = True
            warn.append("repeated class breaks (tied burden values)")
    else:
        qs = np.array([])
        breaks = []
        degenerate = True
        warn.append("no region has burden data")
    regions = []
    for code in sorted(burdens):
        v = burdens[code]
        if v is None:
            regions.append(ClassedRegion(code, None, NODATA, NODATA_FILL))
        else:
            idx = int(np.sum(qs < v))
            regions.append(ClassedRegion(code, float(v), idx, ramp[idx]))
    for w in warn:
        logger.warning("classify: %s", w)
    return Classification(regions, breaks, classes, degenerate, warn)


@dataclass(frozen=True)
class DotSpec:
    lat: float
    lon: float
    weight: float
    radius_px: float


def make_dot(lat, lon, papers, r_base=4.0, r_min=1.0, r_max=8.0) -> DotSpec:
    if not 0 < r_min <= r_max:
        raise ValueError("need 0 < r_min <= r_max")
    w = dot_weight(papers)
    return DotSpec(float(lat), float(lon), w, min(max(r_base * w, r_min), r_max))


@dataclass(frozen=True)
class Projection:
    """Equirectangular: lon maps linearly to x, lat to y (north up)."""

    width: int = 1000
    height: int = 500
    lon_min: float = -180.0
    lon_max: float = 180.0
    lat_min: float = -90.0
    lat_max: float = 90.0

    def __call__(self, lat, lon):
        x = (lon - self.lon_min) / (self.lon_max - self.lon_min) * self.width
        y = (self.lat_max - lat) / (self.lat_max - self.lat_min) * self.height
        return x, y


@dataclass
class MapSpec:
    regions: list[ClassedRegion]
    dots: list[DotSpec]
    projection: Projection = field(default_factory=Projection)
    legend: list[float] = field(default_factory=list)
    title: str = ""

    @classmethod
    def build(cls, classification: Classification, points, papers, *, title="",
              projection=None, r_base=4.0, r_min=1.0, r_max=8.0) -> "MapSpec":
        """``points`` is an iterable of (lat, lon, region_code)."""
        dots = [make_dot(lat, lon, papers.get(region, 0), r_base, r_min, r_max)
                for lat, lon, region in points]
        return cls(classification.regions, dots, projection or Projection(),
                   list(classification.breaks), title)


# ------------------------------------------------------------- boundaries

def load_boundaries(path) -> dict:
    """Read a GeoJSON FeatureCollection into region_code -> geometry."""
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"boundaries not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise MalformedBoundaries(f"{path}: not valid JSON: {exc}") from exc
    return parse_boundaries(data)


def parse_boundaries(data) -> dict:
    if not isinstance(data, dict) or data.get("type") != "FeatureCollection":
        raise MalformedBoundaries("boundaries must be a GeoJSON FeatureCollection")
    out = {}
    for i, feat in enumerate(data.get("features") or []):
        try:
            code = feat["properties"]["region_code"]
            geom = feat["geometry"]
            kind = geom["type"]
            coords = geom["coordinates"]
        except (KeyError, TypeError) as exc:
            raise MalformedBoundaries(f"feature {i}: missing {exc}") from exc
        if kind == "Polygon":
            polys = [coords]
        elif kind == "MultiPolygon":
            polys = coords
        else:
            raise MalformedBoundaries(f"feature {i} ({code}): unsupported geometry {kind!r}")
        out.setdefault(code, []).extend(polys)
    return out


def _as_boundaries(boundaries) -> dict:
    """Accept a path, a raw FeatureCollection, or an already parsed map."""
    if isinstance(boundaries, dict):
        return parse_boundaries(boundaries) if boundaries.get("type") == "FeatureCollection" else boundaries
    return load_boundaries(boundaries)


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _path_d(polys, proj: Projection) -> str:
    parts = []
    for poly in polys:
        for ring in poly:
            pts = [proj(lat, lon) for lon, lat, *_ in ring]
            if not pts:
                continue
            parts.append("M" + " L".join(f"{_num(x)},{_num(y)}" for x, y in pts) + " Z")
    return " ".join(parts)


def render_svg(spec: MapSpec, boundaries) -> tuple[str, list[str]]:
    """Return the SVG document and the warnings raised while drawing it.

    ``boundaries`` is a path, a GeoJSON FeatureCollection, or the dict from
    :func:`load_boundaries`. Regions missing from the boundaries are
    skipped; dots are unaffected.
    """
    boundaries = _as_boundaries(boundaries)
    proj = spec.projection
    w, h = proj.width, proj.height
    legend_h = 30
    warns = []
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h + legend_h}" '
        f'viewBox="0 0 {w} {h + legend_h}">',
    ]
    if spec.title:
        out.append(f"<title>{escape(spec.title)}</title>")
    out.append(f'<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="#f7f7f7"/>')
    out.append('<g class="regions">')
    for region in sorted(spec.regions, key=lambda r: r.region_code):
        polys = boundaries.get(region.region_code)
        if not polys:
            warns.append(f"MissingGeometry: no boundary for region {region.region_code}")
            continue
        cls = "nodata" if region.nodata else f"c{region.class_index}"
        out.append(f'<path id="{escape(region.region_code)}" class="{cls}" fill="{region.fill}" '
                   f'stroke="{STROKE}" stroke-width="0.5" d="{_path_d(polys, proj)}"/>')
    out.append("</g>")
    out.append(f'<g class="dots" fill="{DOT_FILL}" fill-opacity="{DOT_OPACITY}">')
    for d in spec.dots:
        x, y = proj(d.lat, d.lon)
        out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(d.radius_px)}"/>')
    out.append("</g>")
    out.extend(_legend(spec, h))
    out.append("</svg>")
    for m in warns:
        logger.warning(m)
    return "\n".join(out) + "\n", warns


def _legend(spec: MapSpec, top: int) -> list[str]:
    n = max(len(spec.legend) - 1, 0)
    ramp = blue_ramp(n) if n else ()
    out = ['<g class="legend" font-family="sans-serif" font-size="9">']
    x = 5
    for i in range(n):
        lo, hi = spec.legend[i], spec.legend[i + 1]
        out.append(f'<rect x="{x}" y="{top + 8}" width="12" height="12" fill="{ramp[i]}" stroke="{STROKE}"/>')
        out.append(f'<text x="{x + 15}" y="{top + 18}">{lo:.3g} - {hi:.3g}</text>')
        x += 110
    out.append(f'<rect x="{x}" y="{top + 8}" width="12" height="12" fill="{NODATA_FILL}" stroke="{STROKE}"/>')
    out.append(f'<text x="{x + 15}" y="{top + 18}">no data</text>')
    out.append("</g>")
    return out


def render_geojson(spec: MapSpec, boundaries=None) -> str:
    """FeatureCollection: one feature per region, then one Point per dot.

    Region geometry is attached when ``boundaries`` is given, else null.
    """
    if boundaries is not None:
        boundaries = _as_boundaries(boundaries)
    features = []
    for r in sorted(spec.regions, key=lambda r: r.region_code):
        geom = None
        if boundaries is not None and boundaries.get(r.region_code):
            geom = {"type": "MultiPolygon", "coordinates": boundaries[r.region_code]}
        features.append({
            "type": "Feature",
            "geometry": geom,
            "properties": {
                "kind": "region",
                "region_code": r.region_code,
                "burden": r.burden,
                "class_index": r.class_index,
                "fill": r.fill,
            },
        })
    for d in spec.dots:
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [d.lon, d.lat]},
            "properties": {"kind": "tweet", "weight": d.weight, "radius_px": d.radius_px},
        })
    doc = {
        "type": "FeatureCollection",
        "properties": {"title": spec.title, "class_breaks": spec.legend},
        "features": features,
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
