import pytest

from lgmirror.lattice import convex_hull, lattice_points
from lgmirror.lg import (
    LGError,
    NablaData,
    check_degree_consistency,
    check_exponent_identity,
    compactify_fiber,
    givental_hybrid,
    non_nef_split_fiber,
    pi_gamma_monomials,
)
from lgmirror.nef import validate_nef
from lgmirror.partitions import central_frame, build_fibration_fans


def term_set(eq):
    return {(t.coef, t.sign, tuple((s, e) for s, e in t.exps if e))
            for t in eq.terms}


@pytest.fixture
def diamond_model(diamond):
    nef = validate_nef(diamond, [(3, 2, 1), (0,)])
    return givental_hybrid(nef, 1, 1), NablaData.from_nef(nef)


def test_givental_monomial_supports(diamond_model):
    model, _ = diamond_model
    assert [m[1] for m in model.constraints[0].monomials] == \
        [(0, -1), (0, 0), (0, 1), (1, 0)]
    assert [m[1] for m in model.potentials[0].monomials] == [(-1, 0), (0, 0)]


def test_pure_potential_split(diamond):
    nef = validate_nef(diamond, [(0, 1, 2, 3)])
    model = givental_hybrid(nef, 0, 1)
    assert model.constraints == ()
    assert [m[1] for m in model.potentials[0].monomials] == \
        lattice_points(diamond)


def test_rank_bookkeeping(square):
    # a three-part nef partition of the square: opposite-corner parts are not
    # nef, so use one part per pair of adjacent vertices plus the rest
    nef = validate_nef(square, [(0, 1, 2, 3)])
    with pytest.raises(LGError):
        givental_hybrid(nef, 1, 1)  # 2 != 1 part


def test_compactified_equations_match_worked_example(diamond_model):
    model, nd = diamond_model
    eqs = compactify_fiber(model, nd, ["lambda"])
    assert len(eqs) == 2

    # the displayed constraint, term for term
    expect0 = {
        ("a_(0,0)", 1, (((-1, -1), 1), ((-1, 0), 1), ((-1, 1), 1),
                        ((0, -1), 1), ((0, 1), 1))),
        ("a_(1,0)", 1, (((0, -1), 1), ((0, 1), 1), ((1, 0), 1))),
        ("a_(0,1)", 1, (((-1, 0), 1), ((-1, 1), 2), ((0, 1), 2))),
        ("a_(0,-1)", 1, (((-1, -1), 2), ((-1, 0), 1), ((0, -1), 2))),
    }
    assert term_set(eqs[0]) == expect0

    expect1 = {
        ("lambda", 1, (((1, 0), 1),)),
        ("a_(-1,0)", -1, (((-1, -1), 1), ((-1, 0), 1), ((-1, 1), 1))),
    }
    assert term_set(eqs[1]) == expect1


def test_single_exponent_example(diamond_model):
    # <(-1,1), (0,1)> - min over Delta_1 = 1 - (-1) = 2
    model, nd = diamond_model
    eqs = compactify_fiber(model, nd)
    term = next(t for t in eqs[0].terms if t.rho == (0, 1))
    assert term.exponent_of((-1, 1)) == 2
    # rho = 0 gives exponent -sigma_min >= 0 everywhere
    origin_term = next(t for t in eqs[0].terms if t.rho == (0, 0))
    assert all(e >= 0 for _, e in origin_term.exps)


def test_exponent_identity_and_degree(diamond_model):
    model, nd = diamond_model
    eqs = compactify_fiber(model, nd)
    assert check_exponent_identity(eqs[0], model.delta_pieces[0])
    assert check_exponent_identity(eqs[1], model.delta_pieces[1])
    assert check_degree_consistency(eqs[0])
    assert check_degree_consistency(eqs[1])


def test_newton_polytope_round_trip(diamond_model):
    model, _ = diamond_model
    for laurent, piece in zip(model.constraints + model.potentials,
                              model.delta_pieces):
        assert laurent.newton_polytope() == piece


def test_non_nef_split_degenerate_equals_compactification(diamond_model):
    model, nd = diamond_model
    pts = [pt for _, pt in model.potentials[0].monomials if any(pt)]
    split_eq = non_nef_split_fiber(model, [pts], nd, ["lambda"])
    direct = compactify_fiber(model, nd, ["lambda"])
    assert term_set(split_eq[0]) == term_set(direct[1])


def test_non_nef_split_square_anticanonical(square):
    nef = validate_nef(square, [(0, 1, 2, 3)])
    model = givental_hybrid(nef, 0, 1)
    nd = NablaData.from_nef(nef)
    pts = [pt for _, pt in model.potentials[0].monomials if any(pt)]
    group1 = [q for q in pts if q[0] != 0]
    group2 = [q for q in pts if q[0] == 0]
    eqs = non_nef_split_fiber(model, [group1, group2], nd)
    assert len(eqs) == 2
    for eq in eqs:
        for t in eq.terms:
            assert all(e >= 0 for _, e in t.exps)
    # the lambda-free parts partition the potential's nonzero terms
    rhos = [t.rho for eq in eqs for t in eq.terms if t.rho is not None]
    assert sorted(rhos) == sorted(pts)
    with pytest.raises(LGError):
        non_nef_split_fiber(model, [group1], nd)


def test_pi_gamma_square(vsplit):
    fr = central_frame(vsplit)
    fans = build_fibration_fans(vsplit, fr)
    pg = pi_gamma_monomials(fans.sigma_prime, fr)
    monos = {frozenset(comp.items()) for comp in pg.components}
    assert monos == {
        frozenset({((1, 1), 1), ((1, 0), 1), ((1, -1), 1)}),
        frozenset({((-1, 1), 1), ((-1, 0), 1), ((-1, -1), 1)}),
    }


def test_pi_gamma_trivial(square):
    from lgmirror.partitions import SemistablePartition
    part = SemistablePartition(square, (square,))
    fr = central_frame(part)
    fans = build_fibration_fans(part, fr)
    assert pi_gamma_monomials(fans.sigma_prime, fr).components == ()


def test_pi_gamma_multiplicity_micro_example():
    # rank-2 frame with the vertical line as the common direction and a
    # synthetic fan containing the ray (2, 1), which projects to twice the
    # distinguished ray (1, 0)
    from lgmirror.partitions import CentralFrame
    from lgmirror.fans import Cone, Fan
    frame = CentralFrame(partition=None, l=1, L_basis=((0, 1),),
                         quotient=((1, 0),), v_quotient=((1,), (-1,)),
                         v_vectors=((1, 0), (-1, 0)),
                         sigma_v=Fan.from_cones([Cone.from_rays([(1,)]),
                                                 Cone.from_rays([(-1,)])], 1))
    fan = Fan.from_cones([Cone.from_rays([(2, 1), (0, 1)]),
                          Cone.from_rays([(0, 1), (-1, 0)]),
                          Cone.from_rays([(-1, 0), (0, -1)]),
                          Cone.from_rays([(0, -1), (2, 1)])], 2)
    pg = pi_gamma_monomials(fan, frame)
    assert pg.components[0] == {(2, 1): 2}
    assert pg.components[1] == {(-1, 0): 1}


def test_pi_gamma_structural_error(tsigma_part):
    # the full quotient frame of the triangle partition sends some refined
    # rays inside two-dimensional cones, which the monomial map rejects
    fr = central_frame(tsigma_part)
    fans = build_fibration_fans(tsigma_part, fr)
    with pytest.raises(LGError):
        pi_gamma_monomials(fans.sigma_prime, fr)
