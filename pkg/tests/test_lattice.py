import itertools

import pytest

from lgmirror.lattice import (
    LatticeError,
    apply_unimodular,
    boundary_lattice_points,
    convex_hull,
    face_lattice,
    faces,
    interior_lattice_points,
    intersect,
    is_face_of,
    is_reflexive,
    is_simplicial,
    is_smooth,
    lattice_points,
    minkowski_sum,
    normalized_volume,
    polar_dual,
    polygon_normal_form,
    polytope_from_doc,
    polytope_to_doc,
    reflexive_polygons,
    relative_interior_lattice_points,
)


def brute_force_facets(points, normal_bound=2):
    """Oracle: enumerate supporting inequalities over small normal vectors."""
    n = len(points[0])
    found = set()
    for nrm in itertools.product(range(-normal_bound, normal_bound + 1),
                                 repeat=n):
        if not any(nrm):
            continue
        vals = [sum(a * b for a, b in zip(nrm, p)) for p in points]
        m = min(vals)
        tight = [p for p, v in zip(points, vals) if v == m]
        # a facet is tight on an affinely (n-1)-dimensional set
        if len(tight) >= n:
            diffs = [[a - b for a, b in zip(p, tight[0])] for p in tight[1:]]
            from lgmirror.linalg import rank
            if rank(diffs) == n - 1:
                from math import gcd
                g = 0
                for x in nrm:
                    g = gcd(g, abs(x))
                if all(x % g == 0 for x in nrm) and m % g == 0:
                    found.add((tuple(x // g for x in nrm), -(m // g)))
    return found


def test_hull_of_own_vertices(square):
    assert square.vertices == ((-1, -1), (-1, 1), (1, -1), (1, 1))
    assert len(square.facets) == 4


def test_hull_drops_interior_point(square):
    again = convex_hull([(1, 1), (1, -1), (-1, 1), (-1, -1), (0, 0)])
    assert again == square


def test_diamond_facets_match_brute_force_oracle(diamond):
    oracle = brute_force_facets(list(diamond.vertices))
    assert set(diamond.facets) == oracle
    assert set(diamond.facets) == {((1, 1), 1), ((1, -1), 1),
                                   ((-1, 1), 1), ((-1, -1), 1)}


def test_hull_rejects_empty_and_mixed():
    with pytest.raises(LatticeError):
        convex_hull([])
    with pytest.raises(LatticeError):
        convex_hull([(1, 0), (1, 0, 0)])


def test_faces_counts(square, cube):
    assert len(faces(square, 1)) == 4
    assert len(faces(square, 0)) == 4
    assert len(faces(cube, 2)) == 6
    assert len(faces(cube, 1)) == 12
    assert len(faces(cube, 0)) == 8
    with pytest.raises(LatticeError):
        faces(square, 3)


def test_face_vertex_sets(square):
    edges = faces(square, 1)
    edge_sets = {frozenset(f.vertices()) for f in edges}
    assert frozenset({(-1, -1), (-1, 1)}) in edge_sets
    assert all(f.dimension == 1 for f in edges)


def grid_scan(p):
    """Oracle: direct box scan with the inequality test."""
    los = [min(v[i] for v in p.vertices) for i in range(p.ambient_rank)]
    his = [max(v[i] for v in p.vertices) for i in range(p.ambient_rank)]
    out = []
    for q in itertools.product(*[range(lo, hi + 1)
                                 for lo, hi in zip(los, his)]):
        if all(sum(a * b for a, b in zip(nrm, q)) >= -o
               for nrm, o in p.facets):
            out.append(q)
    return out


def test_lattice_points_square(square):
    assert len(lattice_points(square)) == 9
    assert lattice_points(square) == sorted(grid_scan(square))
    assert interior_lattice_points(square) == [(0, 0)]


def test_lattice_points_diamond(diamond):
    assert len(lattice_points(diamond)) == 5
    assert interior_lattice_points(diamond) == [(0, 0)]


def test_segment_in_rank_two():
    seg = convex_hull([(0, 0), (1, 0)])
    assert seg.dim == 1
    assert lattice_points(seg) == [(0, 0), (1, 0)]
    assert interior_lattice_points(seg) == []
    assert relative_interior_lattice_points(seg) == []
    three = convex_hull([(0, 0), (3, 0)])
    assert relative_interior_lattice_points(three) == [(1, 0), (2, 0)]
    assert interior_lattice_points(three) == []


def test_reflexivity(square, diamond):
    assert is_reflexive(square)
    assert is_reflexive(diamond)
    big = convex_hull([(2, 2), (2, -2), (-2, 2), (-2, -2)])
    assert not is_reflexive(big)
    assert len(interior_lattice_points(big)) == 9
    shifted = convex_hull([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert not is_reflexive(shifted)


def test_polar_dual_square_diamond(square, diamond):
    assert polar_dual(square) == diamond
    assert polar_dual(diamond) == square
    assert polar_dual(square).lattice == "N"
    with pytest.raises(LatticeError):
        polar_dual(convex_hull([(2, 2), (2, -2), (-2, 2), (-2, -2)]))


def test_polar_dual_simplex_involution():
    simplex = convex_hull([(-1, -1), (1, 0), (0, 1)])
    assert is_reflexive(simplex)
    assert polar_dual(polar_dual(simplex)) == simplex


def test_simplicial_smooth(square, diamond, cube):
    assert is_smooth(square)
    assert is_simplicial(diamond) and not is_smooth(diamond)
    assert is_smooth(cube)
    # oracle for the diamond: edge primitives at (1,0) are (-1,1), (-1,-1)
    det = (-1) * (-1) - 1 * (-1)
    assert abs(det) == 2


def test_minkowski_sum(square):
    n1 = convex_hull([(-1, -1), (-1, 1), (0, -1), (0, 1)])
    n2 = convex_hull([(0, 0), (1, 0)])
    assert minkowski_sum(n1, n2) == square
    origin = convex_hull([(0, 0)])
    assert minkowski_sum(square, origin) == square
    sx = convex_hull([(0, 0), (1, 0)])
    sy = convex_hull([(0, 0), (0, 1)])
    unit = convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert minkowski_sum(sx, sy) == unit
    with pytest.raises(LatticeError):
        minkowski_sum(square, convex_hull([(0,), (1,)]))


def test_volume(square, diamond, cube):
    assert normalized_volume(square) == 8
    assert normalized_volume(diamond) == 4
    assert normalized_volume(cube) == 48
    assert normalized_volume(convex_hull([(0, 0), (2, 0)])) == 2


def test_intersection_is_common_face():
    left = convex_hull([(-1, -1), (-1, 1), (0, -1), (0, 1)])
    right = convex_hull([(0, -1), (0, 1), (1, -1), (1, 1)])
    wall = intersect(left, right)
    assert wall.vertices == ((0, -1), (0, 1))
    assert is_face_of(wall, left) and is_face_of(wall, right)
    far = convex_hull([(5, 5), (6, 5), (5, 6)])
    assert intersect(left, far) is None


def test_euler_face_relation(square, diamond, cube):
    for p in (square, diamond, cube):
        total = sum((-1) ** l * len(faces(p, l)) for l in range(p.dim))
        assert total == 1 - (-1) ** p.dim


def test_sixteen_reflexive_polygons():
    polys = reflexive_polygons()
    assert len(polys) == 16
    forms = {polygon_normal_form(p) for p in polys}
    assert len(forms) == 16
    # the boundary-point counts of the classification, and the "12 theorem"
    counts = sorted(len(boundary_lattice_points(p)) for p in polys)
    assert counts == [3, 4, 4, 4, 5, 5, 6, 6, 6, 6, 7, 7, 8, 8, 8, 9]
    for p in polys:
        assert len(boundary_lattice_points(p)) + \
            len(boundary_lattice_points(polar_dual(p))) == 12


def test_normal_form_is_unimodular_invariant():
    simplex = convex_hull([(-1, -1), (1, 0), (0, 1)])
    image = apply_unimodular(simplex, [[1, 1], [0, 1]])
    assert polygon_normal_form(simplex) == polygon_normal_form(image)
    square = convex_hull([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    assert polygon_normal_form(simplex) != polygon_normal_form(square)


def test_document_round_trip(square):
    doc = polytope_to_doc(square)
    assert doc["facets"] == [{"normal": list(n), "offset": o}
                             for n, o in square.facets]
    assert polytope_from_doc(doc) == square
