import xml.etree.ElementTree as ET

import pytest

from colorpath.geometry import (
    Disk,
    ObstacleScene,
    Rect,
    SceneError,
    SimplePolygon,
    format_scene,
    parse_scene,
    rasterize_scene,
    render_svg,
)
from colorpath.graph import intersection_number, is_color_connected
from colorpath.oracles import pareto_exact, xp_subset_solver
from colorpath.repset import solve_colored_path

SVG = "{http://www.w3.org/2000/svg}"


def optimum(g):
    return next(k for k in range(g.n_colors + 1) if xp_subset_solver(g, k).found)


def shapes(svg):
    root = ET.fromstring(svg.split("\n", 1)[1])
    return [el for el in root if el.get("class") == "obstacle"], root


def test_empty_scene_is_free():
    sc = ObstacleScene(4, 3, 2, [], (0.2, 0.2), (3.8, 2.8))
    g = rasterize_scene(sc)
    assert g.n == 8 * 6 and all(c == 0 for c in g.chi)
    assert pareto_exact(g).value == 0


def test_full_height_wall_costs_one():
    sc = ObstacleScene(6, 4, 2, [Rect(2.5, 0, 3.5, 4)], (0.5, 2), (5.5, 2))
    g = rasterize_scene(sc)
    assert optimum(g) == 1
    sol = solve_colored_path(g.with_budget(1))
    assert sol.found and sol.colors == 1


def test_disk_wall_with_cheap_gap():
    # two overlapping disks span the full height; crossing their overlap
    # costs two, while the top gap is closed by a single thin rect
    obs = [Disk(3, 1.5, 1.8), Disk(3, 4.0, 1.8), Rect(2.5, 5.5, 3.5, 6)]
    sc = ObstacleScene(6, 6, 2, obs, (0.5, 3), (5.5, 3))
    g = rasterize_scene(sc)
    assert optimum(g) == 1
    assert pareto_exact(g).value == 1


def test_rasterized_scenes_are_color_connected():
    sc = ObstacleScene(8, 8, 2, [Disk(4, 4, 2), Rect(0, 0, 3, 1), SimplePolygon(((5, 5), (8, 6), (6, 8)))],
                       (0.2, 7.8), (7.8, 0.2))
    assert is_color_connected(rasterize_scene(sc))[0]


def test_empty_scene_renders_frame_and_markers_only():
    sc = ObstacleScene(4, 3, 2, [], (0.2, 0.2), (3.8, 2.8))
    obstacles, root = shapes(render_svg(sc))
    assert obstacles == []
    assert [el.get("class") for el in root] == ["frame", "start", "goal"]


def test_three_obstacles_three_shapes():
    obs = [Disk(2, 2, 1), Rect(4, 0, 5, 3), SimplePolygon(((6, 1), (7.5, 1), (7, 3)))]
    sc = ObstacleScene(8, 4, 2, obs, (0.2, 3.8), (7.8, 3.8))
    found, root = shapes(render_svg(sc))
    assert [el.tag for el in found] == [SVG + "circle", SVG + "rect", SVG + "polygon"]
    assert root.find(SVG + "polyline") is None


def test_render_draws_solution_path():
    sc = ObstacleScene(6, 4, 2, [Rect(2.5, 0, 3.5, 4)], (0.5, 2), (5.5, 2))
    sol = solve_colored_path(rasterize_scene(sc, 1))
    _, root = shapes(render_svg(sc, sol.path))
    line = root.find(SVG + "polyline")
    assert line is not None and len(line.get("points").split()) == len(sol.path)


def test_render_is_byte_deterministic():
    sc = ObstacleScene(8, 4, 2, [Disk(2, 2, 1), Rect(4, 0, 5, 3)], (0.2, 3.8), (7.8, 3.8))
    path = solve_colored_path(rasterize_scene(sc, 1)).path
    assert render_svg(sc, path) == render_svg(sc, path)


def test_render_rejects_invalid_path():
    sc = ObstacleScene(4, 4, 1, [], (0.5, 0.5), (3.5, 3.5))
    with pytest.raises(SceneError):
        render_svg(sc, [0, 2])
    with pytest.raises(SceneError):
        render_svg(sc, [0, 1, 0])


def test_intersection_number_grows_with_resolution():
    vals = []
    for res in (2, 4, 8):
        sc = ObstacleScene(6, 6, res, [Disk(3, 3, 1.5), Disk(4, 3, 1.5)], (0.1, 0.1), (5.9, 5.9))
        vals.append(intersection_number(rasterize_scene(sc)))
    assert vals[0] < vals[1] < vals[2]
    # the overlap area is fixed, so the cell count scales with the square of the resolution
    assert 2 <= vals[2] / vals[1] <= 6


def test_optimum_does_not_grow_with_resolution_on_convex_scenes():
    obs = [Disk(3, 3, 1.2), Rect(4.5, 0, 5.2, 4.5), Disk(7.5, 6, 1.4), Rect(1, 5, 6, 5.6)]
    opts = []
    for res in (2, 4, 8):
        sc = ObstacleScene(10, 8, res, obs, (0.3, 0.3), (9.7, 7.7))
        opts.append(pareto_exact(rasterize_scene(sc)).value)
    assert opts[0] >= opts[1] >= opts[2]


def test_resolution_error_names_obstacle():
    sc = ObstacleScene(4, 4, 1, [Rect(0, 0, 4, 1), Disk(2, 2, 0.1)], (0.5, 3.5), (3.5, 3.5))
    with pytest.raises(SceneError, match="obstacle 1"):
        rasterize_scene(sc)
    # a U shape whose bottom falls between cell centers splits apart
    u = SimplePolygon(((0.6, 0.6), (1.9, 0.6), (1.9, 3.4), (1.6, 3.4), (1.6, 0.7), (0.9, 0.7), (0.9, 3.4), (0.6, 3.4)))
    sc2 = ObstacleScene(4, 4, 2, [u], (3.5, 0.5), (3.5, 3.5))
    with pytest.raises(SceneError, match="obstacle 0"):
        rasterize_scene(sc2)


def test_non_simple_polygon_rejected():
    bow = SimplePolygon(((0, 0), (2, 2), (2, 0), (0, 2)))
    with pytest.raises(SceneError, match="not simple"):
        ObstacleScene(4, 4, 2, [bow], (3.5, 0.5), (3.5, 3.5)).check()


def test_scene_round_trip():
    text = (
        "scene 10 8 3\n"
        "disk 2 3.5 1.25\n"
        "rect 4 0 5 6\n"
        "poly 6 1 8 1 7 3\n"
        "start 0.5 0.5\n"
        "goal 9.5 7.5\n"
    )
    sc = parse_scene(text)
    assert format_scene(sc) == text
    assert parse_scene(format_scene(sc)) == sc


@pytest.mark.parametrize("text", [
    "scene 4 4\nstart 0 0\ngoal 1 1\n",
    "scene 4 4 2\nstart 0 0\n",
    "scene 4 4 2\nstart 0 0\ngoal 1 1\ngoal 2 2\n",
    "scene 4 4 2\nblob 1 2\nstart 0 0\ngoal 1 1\n",
    "scene 4 4 2\nstart 9 0\ngoal 1 1\n",
])
def test_malformed_scenes_rejected(text):
    with pytest.raises(SceneError):
        parse_scene(text)
