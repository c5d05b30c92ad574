"""Obstacle scenes: parsing, grid rasterization to colored graphs and SVG output.

Each obstacle becomes one color.  A grid cell carries the colors of every
obstacle covering its center (boundaries count as covered), and cells are
joined to their four axis neighbors.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import shapely
from scipy import ndimage

from .graph import ColoredGraph


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float


@dataclass(frozen=True)
class Rect:
    x1: float
    y1: float
    x2: float
    y2: float


@dataclass(frozen=True)
class SimplePolygon:
    points: Tuple[Tuple[float, float], ...]


Obstacle = Union[Disk, Rect, SimplePolygon]


@dataclass
class ObstacleScene:
    width: float
    height: float
    resolution: int
    obstacles: List[Obstacle] = field(default_factory=list)
    start: Tuple[float, float] = (0.0, 0.0)
    goal: Tuple[float, float] = (0.0, 0.0)

    def check(self) -> None:
        if self.resolution < 1:
            raise SceneError("resolution must be at least 1")
        if self.width <= 0 or self.height <= 0:
            raise SceneError("scene extent must be positive")
        for name, (x, y) in (("start", self.start), ("goal", self.goal)):
            if not (0 <= x <= self.width and 0 <= y <= self.height):
                raise SceneError(f"{name} point outside the scene")
        for i, ob in enumerate(self.obstacles):
            if isinstance(ob, Disk) and ob.r <= 0:
                raise SceneError(f"obstacle {i}: radius must be positive")
            if isinstance(ob, Rect) and (ob.x1 > ob.x2 or ob.y1 > ob.y2):
                raise SceneError(f"obstacle {i}: rectangle corners out of order")
            if isinstance(ob, SimplePolygon):
                if len(ob.points) < 3:
                    raise SceneError(f"obstacle {i}: polygon needs three points")
                if not shapely.LinearRing(ob.points).is_simple:
                    raise SceneError(f"obstacle {i}: polygon is not simple")


# --- text format ----------------------------------------------------------


def _num(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise SceneError(f"bad number {tok!r}") from None


def parse_scene(text: str) -> ObstacleScene:
    scene = None
    obstacles: List[Obstacle] = []
    start = goal = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        kind, vals = line[0], [_num(x) for x in line[1:]]
        if kind == "scene":
            if scene is not None or len(vals) != 3:
                raise SceneError(f"line {no}: expected one 'scene w h res' line")
            if vals[2] != int(vals[2]):
                raise SceneError(f"line {no}: resolution must be an integer")
            scene = (vals[0], vals[1], int(vals[2]))
        elif kind == "disk" and len(vals) == 3:
            obstacles.append(Disk(*vals))
        elif kind == "rect" and len(vals) == 4:
            obstacles.append(Rect(*vals))
        elif kind == "poly" and len(vals) >= 6 and len(vals) % 2 == 0:
            obstacles.append(SimplePolygon(tuple(zip(vals[0::2], vals[1::2]))))
        elif kind in ("start", "goal") and len(vals) == 2:
            if (start if kind == "start" else goal) is not None:
                raise SceneError(f"line {no}: duplicate {kind} line")
            if kind == "start":
                start = (vals[0], vals[1])
            else:
                goal = (vals[0], vals[1])
        else:
            raise SceneError(f"line {no}: cannot parse {raw.strip()!r}")
    if scene is None or start is None or goal is None:
        raise SceneError("scene, start and goal lines are required")
    sc = ObstacleScene(scene[0], scene[1], scene[2], obstacles, start, goal)
    sc.check()
    return sc


def _fmt(x: float) -> str:
    return repr(float(x)).removesuffix(".0") if float(x).is_integer() else repr(float(x))


def format_scene(scene: ObstacleScene) -> str:
    out = [f"scene {_fmt(scene.width)} {_fmt(scene.height)} {scene.resolution}"]
    for ob in scene.obstacles:
        if isinstance(ob, Disk):
            out.append(f"disk {_fmt(ob.cx)} {_fmt(ob.cy)} {_fmt(ob.r)}")
        elif isinstance(ob, Rect):
            out.append(f"rect {_fmt(ob.x1)} {_fmt(ob.y1)} {_fmt(ob.x2)} {_fmt(ob.y2)}")
        else:
            out.append("poly " + " ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in ob.points))
    out.append(f"start {_fmt(scene.start[0])} {_fmt(scene.start[1])}")
    out.append(f"goal {_fmt(scene.goal[0])} {_fmt(scene.goal[1])}")
    return "\n".join(out) + "\n"


# --- rasterization --------------------------------------------------------


@dataclass
class GridDiscretization:
    cols: int
    rows: int
    cells: np.ndarray  # (rows, cols) object array of color masks
    cell_of_start: int
    cell_of_goal: int

    def center(self, scene: ObstacleScene, v: int) -> Tuple[float, float]:
        j, i = divmod(v, self.cols)
        return ((i + 0.5) / scene.resolution, (j + 0.5) / scene.resolution)


def grid_shape(scene: ObstacleScene) -> Tuple[int, int]:
    cols = max(1, math.ceil(scene.width * scene.resolution - 1e-9))
    rows = max(1, math.ceil(scene.height * scene.resolution - 1e-9))
    return cols, rows


def coverage(scene: ObstacleScene, ob: Obstacle) -> np.ndarray:
    """Boolean (rows, cols) mask of cells whose center the obstacle covers."""
    cols, rows = grid_shape(scene)
    xs = (np.arange(cols) + 0.5) / scene.resolution
    ys = (np.arange(rows) + 0.5) / scene.resolution
    X, Y = np.meshgrid(xs, ys)
    if isinstance(ob, Disk):
        return (X - ob.cx) ** 2 + (Y - ob.cy) ** 2 <= ob.r ** 2
    if isinstance(ob, Rect):
        return (X >= ob.x1) & (X <= ob.x2) & (Y >= ob.y1) & (Y <= ob.y2)
    poly = shapely.Polygon(ob.points)
    return shapely.intersects_xy(poly, X, Y)


def _cell_of(scene: ObstacleScene, point: Tuple[float, float], cols: int, rows: int) -> int:
    i = min(cols - 1, int(point[0] * scene.resolution))
    j = min(rows - 1, int(point[1] * scene.resolution))
    return j * cols + i


def discretize(scene: ObstacleScene) -> GridDiscretization:
    scene.check()
    cols, rows = grid_shape(scene)
    masks = np.zeros((rows, cols), dtype=object)
    masks[:] = 0
    for idx, ob in enumerate(scene.obstacles):
        cov = coverage(scene, ob)
        _, pieces = ndimage.label(cov)
        if pieces != 1:
            what = "covers no cell" if pieces == 0 else f"splits into {pieces} pieces"
            raise SceneError(f"obstacle {idx} {what} at resolution {scene.resolution}")
        masks[cov] = masks[cov] | (1 << idx)
    s = _cell_of(scene, scene.start, cols, rows)
    t = _cell_of(scene, scene.goal, cols, rows)
    if s == t:
        raise SceneError("start and goal fall in the same cell")
    return GridDiscretization(cols, rows, masks, s, t)


def rasterize_scene(scene: ObstacleScene, k: int = 0) -> ColoredGraph:
    grid = discretize(scene)
    cols, rows = grid.cols, grid.rows
    edges = []
    for j in range(rows):
        for i in range(cols):
            v = j * cols + i
            if i + 1 < cols:
                edges.append((v, v + 1))
            if j + 1 < rows:
                edges.append((v, v + cols))
    n = cols * rows
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    chi = tuple(int(m) for m in grid.cells.ravel())
    return ColoredGraph(
        n=n,
        adj=tuple(tuple(sorted(a)) for a in adj),
        chi=chi,
        n_colors=len(scene.obstacles),
        source=grid.cell_of_start,
        target=grid.cell_of_goal,
        budget=k,
    )


# --- rendering ------------------------------------------------------------


def _f(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


def render_svg(scene: ObstacleScene, path: Optional[Sequence[int]] = None, scale: float = 20.0) -> str:
    """SVG document with the obstacles, start and goal, and an optional path.

    ``path`` lists grid vertices of the rasterized scene; consecutive cells
    must be 4-neighbors.
    """
    cols, rows = grid_shape(scene)
    if path is not None:
        if len(set(path)) != len(path) or any(not 0 <= v < cols * rows for v in path):
            raise SceneError("path is not a simple path of grid cells")
        for a, b in zip(path, path[1:]):
            ja, ia = divmod(a, cols)
            jb, ib = divmod(b, cols)
            if abs(ia - ib) + abs(ja - jb) != 1:
                raise SceneError(f"cells {a} and {b} are not neighbors")

    h = scene.height

    def pt(x: float, y: float) -> Tuple[str, str]:
        return _f(x * scale), _f((h - y) * scale)

    svg = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "version": "1.1",
            "width": _f(scene.width * scale),
            "height": _f(h * scale),
            "viewBox": f"0 0 {_f(scene.width * scale)} {_f(h * scale)}",
        },
    )
    ET.SubElement(
        svg, "rect",
        {"class": "frame", "x": "0", "y": "0", "width": _f(scene.width * scale),
         "height": _f(h * scale), "fill": "white", "stroke": "black"},
    )
    style = {"class": "obstacle", "fill": "#4060c0", "fill-opacity": "0.35", "stroke": "#203060"}
    for idx, ob in enumerate(scene.obstacles):
        attrs = dict(style, id=f"obstacle-{idx}")
        if isinstance(ob, Disk):
            cx, cy = pt(ob.cx, ob.cy)
            ET.SubElement(svg, "circle", dict(attrs, cx=cx, cy=cy, r=_f(ob.r * scale)))
        elif isinstance(ob, Rect):
            x, y = pt(ob.x1, ob.y2)
            ET.SubElement(
                svg, "rect",
                dict(attrs, x=x, y=y, width=_f((ob.x2 - ob.x1) * scale), height=_f((ob.y2 - ob.y1) * scale)),
            )
        else:
            pts = " ".join(",".join(pt(x, y)) for x, y in ob.points)
            ET.SubElement(svg, "polygon", dict(attrs, points=pts))
    if path:
        res = scene.resolution
        pts = []
        for v in path:
            j, i = divmod(v, cols)
            pts.append(",".join(pt((i + 0.5) / res, (j + 0.5) / res)))
        ET.SubElement(
            svg, "polyline",
            {"class": "path", "points": " ".join(pts), "fill": "none", "stroke": "#d02020", "stroke-width": "2"},
        )
    for name, (x, y), color in (("start", scene.start, "#20a020"), ("goal", scene.goal, "#d08000")):
        cx, cy = pt(x, y)
        ET.SubElement(svg, "circle", {"class": name, "cx": cx, "cy": cy, "r": _f(0.15 * scale), "fill": color})
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"
