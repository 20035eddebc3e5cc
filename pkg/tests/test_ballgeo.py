"""Faces of the penalty ball: feasibility, extremality, lattice, DOT export."""
import numpy as np
import pytest

from l1geo.ballgeo import (Dictionary, InfeasibleSignError,
                           brute_force_feasible_signs,
                           enumerate_feasible_signs, face_contains,
                           face_from_sign, hasse_diagram, is_extremal,
                           is_feasible, is_pre_extremal,
                           minimal_face_of_point, to_dot)
from l1geo.dictionaries import (complete_graph_edges, difference_dict,
                                identity_dict, incidence_dict)
from l1geo.signs import SignVector, sign_of


def test_dictionary_caches():
    d = Dictionary(difference_dict(3))
    assert (d.n, d.p) == (3, 2)
    assert np.allclose(d.atom(0), [-1.0, 1.0, 0.0])
    assert d.l1_value(np.array([0.0, 1.0, 3.0])) == pytest.approx(3.0)
    assert d.kernel_dstar.shape == (3, 1)  # the constants
    assert np.allclose(d.Dstar @ d.kernel_dstar, 0.0, atol=1e-12)
    with pytest.raises(IndexError):
        d.atom(5)


def test_is_feasible_witness_realizes_sign(bench3d):
    d = bench3d.dictionary
    s = SignVector.from_string("+0+")
    verdict = is_feasible(d, s)
    assert verdict.feasible
    assert sign_of(d.Dstar @ verdict.witness) == s


def test_is_feasible_cycle_is_infeasible(k4_dict):
    # edges (0,1), (0,2), (1,2) carry x0>x1, x0<x2, x1>x2: a strict cycle
    s = SignVector((1, -1, 0, 1, 0, 0))
    verdict = is_feasible(k4_dict, s)
    assert not verdict.feasible
    assert verdict.certificate is not None


def test_enumerate_feasible_signs_identity2():
    d = Dictionary(identity_dict(2))
    signs = enumerate_feasible_signs(d)
    assert len(signs) == 9
    assert signs == sorted(signs, key=lambda s: s.entries)
    assert all(-s in set(signs) for s in signs)  # centrosymmetry
    wit = enumerate_feasible_signs(d, with_witnesses=True)
    assert set(wit) == set(signs)
    for s, x in wit.items():
        assert sign_of(d.Dstar @ x) == s


def test_enumeration_cap():
    d = Dictionary(np.ones((1, 13)))
    with pytest.raises(ValueError):
        enumerate_feasible_signs(d)


def test_extremal_identity2():
    d = Dictionary(identity_dict(2))
    extremal = [s.to_string() for s in enumerate_feasible_signs(d)
                if is_extremal(d, s)]
    assert extremal == ["-0", "0-", "0+", "+0"]
    assert not is_pre_extremal(d, SignVector.zero(2))
    assert not is_extremal(d, SignVector.from_string("++"))


def test_extremal_requires_feasibility(k4_dict):
    s = SignVector((1, -1, 0, 1, 0, 0))  # infeasible cycle from above
    assert is_pre_extremal(k4_dict, s)
    assert not is_extremal(k4_dict, s)


def test_face_from_sign_tv3(tv3_dict):
    s = SignVector.from_string("+0")
    f = face_from_sign(tv3_dict, s, 1.0)
    assert f.dim == 1
    # the face is the ray {(t, 1+t, 1+t)} (as a line segment of the sphere
    # it is a translate of the lineality direction (1,1,1))
    assert f.contains(np.array([0.0, 1.0, 1.0]))
    assert f.contains(np.array([2.0, 3.0, 3.0]))
    assert not f.contains(np.array([0.0, 1.0, 0.0]))
    A_eq, b_eq, A_le, b_le = f.halfspaces()
    x = np.array([0.0, 1.0, 1.0])
    assert np.allclose(A_eq @ x, b_eq, atol=1e-12)
    assert np.all(A_le @ x <= b_le + 1e-12)


def test_face_from_sign_validation(tv3_dict):
    with pytest.raises(ValueError):
        face_from_sign(tv3_dict, SignVector.zero(2), 1.0)
    with pytest.raises(ValueError):
        face_from_sign(tv3_dict, SignVector.from_string("+0"), 0.0)
    zero_face = face_from_sign(tv3_dict, SignVector.zero(2), 0.0)
    assert zero_face.dim == 1  # Ker of the analysis map: the constants
    assert zero_face.contains(np.array([3.0, 3.0, 3.0]))


def test_face_from_sign_check_feasible(k4_dict):
    s = SignVector((1, -1, 0, 1, 0, 0))
    with pytest.raises(InfeasibleSignError):
        face_from_sign(k4_dict, s, 1.0, check_feasible=True)


def test_minimal_face_of_point(tv3_dict):
    f = minimal_face_of_point(tv3_dict, np.array([0.0, 1.0, 1.0]))
    assert f.max_sign == SignVector.from_string("+0")
    assert f.radius == pytest.approx(1.0)
    with pytest.raises(ValueError):
        minimal_face_of_point(tv3_dict, np.array([2.0, 2.0, 2.0]))


def test_face_contains_matches_sign_order(tv3_dict):
    fine = face_from_sign(tv3_dict, SignVector.from_string("++"), 1.0)
    coarse = face_from_sign(tv3_dict, SignVector.from_string("+0"), 1.0)
    other = face_from_sign(tv3_dict, SignVector.from_string("+-"), 1.0)
    assert face_contains(coarse, fine)       # F(+0) subset of F(++)
    assert not face_contains(fine, coarse)
    assert face_contains(coarse, other)      # +0 refines into +- as well
    assert not face_contains(other, fine) and not face_contains(fine, other)
    with pytest.raises(ValueError):
        face_contains(fine, face_from_sign(tv3_dict,
                                           SignVector.from_string("+0"), 2.0))
    d2 = Dictionary(identity_dict(3))
    with pytest.raises(ValueError):
        face_contains(fine, face_from_sign(d2, SignVector.from_string("+00"),
                                           1.0))


def test_hasse_diagram_tv3(tv3_dict):
    h = hasse_diagram(tv3_dict)
    assert len(h.poset.elements) == 9
    assert len(h.poset.cover_edges) == 12
    assert h.dims[SignVector.zero(2)] == 1  # bottom face = lineality line
    assert {s.to_string() for s in h.extremal} == {"-0", "0-", "0+", "+0"}
    assert {s.to_string() for s in h.maximal} == {"--", "-+", "+-", "++"}


def test_hasse_diagram_identity2():
    h = hasse_diagram(Dictionary(identity_dict(2)))
    assert len(h.poset.elements) == 9
    assert len(h.poset.cover_edges) == 12
    assert h.dims[SignVector.zero(2)] == 0
    assert {s.to_string() for s in h.extremal} == {"-0", "0-", "0+", "+0"}


def test_to_dot_frozen_and_deterministic(tv3_dict):
    dot1 = to_dot(hasse_diagram(tv3_dict))
    dot2 = to_dot(hasse_diagram(Dictionary(difference_dict(3))))
    assert dot1 == dot2  # byte-identical across runs
    assert dot1.startswith("digraph feasible_signs {\n  rankdir=BT;\n")
    assert '"+0" [label="+0 (dim 1)", class="extremal"];' in dot1
    assert '"++" [label="++ (dim 2)", class="maximal"];' in dot1
    assert '"00" [label="00 (dim 1)"];' in dot1
    assert '  "00" -> "+0";' in dot1
    assert dot1.endswith("}\n")


def test_brute_force_matches_lp_on_small_dicts(tv3_dict):
    for d in (Dictionary(identity_dict(2)), tv3_dict):
        lp_signs = enumerate_feasible_signs(d)
        sampled = brute_force_feasible_signs(d, samples_per_stratum=300,
                                             seed=1)
        assert set(sampled) <= set(lp_signs)
        assert list(sampled) == list(lp_signs)


def test_brute_force_is_sound_on_random_dict():
    rng = np.random.default_rng(3)
    d = Dictionary(rng.standard_normal((3, 4)))
    lp_signs = set(enumerate_feasible_signs(d))
    sampled = brute_force_feasible_signs(d, samples_per_stratum=50, seed=2)
    assert set(sampled) <= lp_signs
