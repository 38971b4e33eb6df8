# tests/test_diagnostics.py

import pytest

from src.bad_edge import Labeling, make_good
from src.cover import ArgmaxCover, FunctionCover
from src.diagnostics import (
    check_good_labeling,
    check_new_bad_edges,
    check_queue_bound,
    check_star_shape,
    check_triangulation,
    triangulation_report,
)
from src.errors import InternalError
from src.exact_math import RatPoint
from src.polytope import default_anchors, simplex
from src.triangulation import Triangulation, initial_triangulation

# --- Test Fixtures ---


@pytest.fixture
def triangle():
    return simplex(3)


@pytest.fixture
def labeled_triangle(triangle):
    """Single triangle whose vertex e_i carries colour i on face {e_i}."""
    T = initial_triangulation(triangle)
    anchors = default_anchors(triangle, 3)
    faces = {v: triangle.face_id_of([v]) for v in range(3)}
    colors = {v: v + 1 for v in range(3)}
    L = Labeling(faces, colors, {v: anchors.get(colors[v], faces[v]) for v in range(3)})
    cover = FunctionCover(3, lambda color, face_id, x: triangle.face(face_id).vertex_ids == (color - 1,))
    return T, L, cover, anchors


# --- Elimination checks ---


def test_check_queue_bound():
    check_queue_bound({0: {1}, 1: {2}, 2: set()}, 3)
    with pytest.raises(InternalError, match="Q_2"):
        check_queue_bound({2: {5}}, 3)


def test_check_star_shape_accepts_and_rejects():
    stars = {4: [(0, 4, 2), (1, 4, 3)], 5: [(0, 4, 5), (4, 2, 5)]}
    # v_1 = 0, v_2 = 1, v_3 = 2; b_2 = 4, b_3 = 5
    check_star_shape(lambda v: stars[v], [0, 1, 2], {1: 0, 2: 4})
    with pytest.raises(InternalError, match="misses both 0 and 1"):
        check_star_shape(lambda v: stars[v], [0, 1, 2], {1: 0, 2: 4, 3: 5})


def test_check_new_bad_edges():
    chain = {1: 0, 2: 4}
    # edge (4, 7) is pending: 7 waits in Q_1, whose centre is b_2 = 4
    check_new_bad_edges({(0, 1), (4, 7)}, {(0, 1)}, {1: {7}}, chain)
    with pytest.raises(InternalError, match="not pending"):
        check_new_bad_edges({(0, 1), (3, 7)}, {(0, 1)}, {1: {7}}, chain)


# --- Output checks ---


def test_check_good_labeling_accepts_rainbow(labeled_triangle, triangle):
    T, L, cover, anchors = labeled_triangle
    check_good_labeling(T, L, cover, triangle, anchors)


def test_check_good_labeling_rejects_repeated_color(labeled_triangle, triangle):
    T, L, _, anchors = labeled_triangle
    colors = {0: 1, 1: 1, 2: 3}
    faces = dict(L.faces)
    bad = Labeling(faces, colors, {v: anchors.get(colors[v], faces[v]) for v in range(3)})
    everything = FunctionCover(3, lambda color, face_id, x: True)
    with pytest.raises(InternalError, match="not rainbow"):
        check_good_labeling(T, bad, everything, triangle, anchors)


def test_check_good_labeling_rejects_membership_and_face(labeled_triangle, triangle):
    T, L, cover, _ = labeled_triangle
    with pytest.raises(InternalError, match="is not in"):
        check_good_labeling(T, L, FunctionCover(3, lambda color, face_id, x: False), triangle)

    # vertex 0 claims the face {e_2}, which is outside its support {e_1}
    faces = dict(L.faces)
    faces[0] = triangle.face_id_of([1])
    moved = Labeling(faces, L.colors, L.anchors)
    with pytest.raises(InternalError, match="not contained in its support"):
        check_good_labeling(T, moved, FunctionCover(3, lambda color, face_id, x: True), triangle)


def test_check_triangulation_wraps_value_errors(triangle):
    points = [RatPoint.of(1, 0, 0), RatPoint.of(0, 1, 0), RatPoint.of(0, 0, 1), RatPoint.of("1/3", "1/3", "1/3")]
    T = Triangulation.from_simplices(triangle, points, [(0, 1, 2), (0, 1, 3)], validate=False)
    with pytest.raises(InternalError, match="Invalid triangulation"):
        check_triangulation(T)
    check_triangulation(initial_triangulation(triangle))


# --- Reports ---


def test_triangulation_report(triangle):
    cover = ArgmaxCover(triangle, 3)
    T, L = make_good(initial_triangulation(triangle), cover, triangle, default_anchors(triangle, 3))
    report = triangulation_report(T, L)
    assert report["vertices"] == T.vertex_count
    assert report["simplices"] == len(T.maximal)
    assert report["bad_edges"] == 0
    assert report["volume"] == [1, 2]
    assert sum(report["color_usage"].values()) == T.vertex_count

    bare = triangulation_report(initial_triangulation(triangle))
    assert bare["max_edge_sq"] == [2, 1]
    assert "color_usage" not in bare
