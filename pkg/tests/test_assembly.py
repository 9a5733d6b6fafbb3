import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from tetrahelix.assembly import (
    CanonicalHelixParams,
    Chain,
    FaceRule,
    HelixSpec,
    assemble,
    canonical_points,
    canonical_tetrahedra,
    extend_periodic,
    rigid_register,
)
from tetrahelix.errors import DegenerateConfiguration, SeamMismatch, SelfCoincidence
from tetrahelix.fixtures import load
from tetrahelix.geometry import GOLDEN_BETA, reference_tetrahedron

betas = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False, exclude_min=True)


def test_canonical_constants():
    p = CanonicalHelixParams()
    assert p.radius == pytest.approx(0.519615, abs=1e-6)
    assert math.cos(p.theta) == pytest.approx(-2 / 3, abs=1e-15)
    assert math.pi / 2 < p.theta < math.pi
    assert p.rise == pytest.approx(1 / math.sqrt(10))


def test_canonical_first_points():
    p = CanonicalHelixParams()
    pts = canonical_points(p, 0, 2)
    np.testing.assert_allclose(pts[0], [3 * math.sqrt(3) / 10, 0, 0], atol=1e-15)
    np.testing.assert_allclose(pts[1], [p.radius * -2 / 3, p.radius * math.sin(p.theta), 1 / math.sqrt(10)], atol=1e-15)
    left = canonical_points(CanonicalHelixParams(chirality="left"), 0, 2)
    assert left[1, 1] == pytest.approx(-pts[1, 1])


def test_canonical_params_validation():
    with pytest.raises(ValueError):
        CanonicalHelixParams(edge=0)
    with pytest.raises(ValueError):
        CanonicalHelixParams(chirality="up")
    with pytest.raises(ValueError):
        canonical_points(CanonicalHelixParams(), 3, 3)


def test_canonical_tuples_are_unit_tetrahedra():
    for t in canonical_tetrahedra(CanonicalHelixParams(), 11):
        assert np.abs(t.edge_lengths() - 1).max() <= 1e-12


def test_canonical_scales_with_edge():
    pts = canonical_points(CanonicalHelixParams(edge=2.5), 0, 4)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    np.testing.assert_allclose(d[np.triu_indices(4, 1)], 2.5, atol=1e-12)


def test_face_rule_cycles():
    seed = reference_tetrahedron()
    assert FaceRule.right().cycle(seed) == (0, 3, 1, 2)
    assert FaceRule.left().cycle(seed) == (0, 3, 2, 1)
    assert FaceRule.explicit([1, 2]).cycle(seed) == (1, 2)
    assert FaceRule.from_name("left") == FaceRule.left()
    # a mirrored seed swaps which cycle is right-handed
    mirrored = type(seed)(seed.vertices * [1, -1, 1])
    assert FaceRule.right().cycle(mirrored) == (0, 3, 2, 1)


def test_face_rule_validation():
    with pytest.raises(ValueError):
        FaceRule.explicit([])
    with pytest.raises(ValueError):
        FaceRule.explicit([4])
    with pytest.raises(ValueError):
        FaceRule("spiral")


def test_spec_validation():
    with pytest.raises(ValueError):
        HelixSpec(0.1, 0)
    with pytest.raises(ValueError):
        HelixSpec(-math.pi, 3)
    HelixSpec(math.pi, 1)


def test_single_tetrahedron_chain():
    chain = assemble(HelixSpec(0.4, 1))
    assert len(chain) == 1 and chain.faces_used == ()


def test_five_period_primitive_set():
    fs = load("5bc")
    chain = assemble(HelixSpec(GOLDEN_BETA, 5))
    assert chain.faces_used == (0, 3, 1, 2)
    for k in range(5):
        assert np.abs(chain[k].vertices - fs.tetrahedra[f"T{k}"]).max() <= 1e-12


def test_three_period_primitive_set():
    fs = load("3bc")
    chain = assemble(HelixSpec(-GOLDEN_BETA, 3))
    for k in range(3):
        assert np.abs(chain[k].vertices - fs.tetrahedra[f"T{k}"]).max() <= 1e-12


def test_regluing_the_same_face_is_rejected():
    with pytest.raises(SelfCoincidence):
        assemble(HelixSpec(0.2, 3, FaceRule.explicit([1])))


def test_register_identity():
    p = reference_tetrahedron().vertices
    r, t, rms = rigid_register(p, p)
    np.testing.assert_allclose(r, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(t, 0, atol=1e-12)
    assert rms <= 1e-12


def test_register_recovers_known_motion():
    p = assemble(HelixSpec(0.7, 4)).vertices().reshape(-1, 3)
    r0 = Rotation.from_rotvec([0, 0, 1.1]).as_matrix()
    t0 = np.array([0.3, -2.0, 5.0])
    r, t, rms = rigid_register(p, p @ r0.T + t0)
    assert np.abs(r - r0).max() <= 1e-10
    assert np.abs(t - t0).max() <= 1e-10
    assert rms <= 1e-12


def test_register_rejects_collinear_points():
    line = np.outer(np.arange(5.0), [1, 2, 3])
    with pytest.raises(DegenerateConfiguration):
        rigid_register(line, line)
    with pytest.raises(ValueError):
        rigid_register(line[:2], line[:2])


def _register_against_canonical(count):
    chain = assemble(HelixSpec(0.0, count))
    ref = canonical_tetrahedra(CanonicalHelixParams(), count)
    # the chain lists each tetrahedron by its own labels; the oldest-first order
    # lines them up with consecutive canonical points
    order = (0, 3, 1, 2)
    p, q = [], []
    for k, (t, s) in enumerate(zip(chain, ref)):
        age = order[k % 4 :] + order[: k % 4]
        p.append(t.vertices[list(age)])
        q.append(s.vertices)
    return rigid_register(np.concatenate(p), np.concatenate(q))[2]


def test_zero_beta_is_canonical_helix():
    assert _register_against_canonical(8) <= 1e-9
    assert _register_against_canonical(11) <= 1e-9


def test_extend_five_period():
    fs = load("5bc")
    primitive = assemble(HelixSpec(GOLDEN_BETA, 5))
    chain = extend_periodic(primitive, fs.vectors["w"], 1)
    assert len(chain) == 10
    assert np.abs(chain[5].vertices - (fs.tetrahedra["T0"] + fs.vectors["w"])).max() <= 1e-12
    assert chain.contact_residuals().max() <= 1e-9


def test_extend_three_period_twice():
    fs = load("3bc")
    chain = extend_periodic(assemble(HelixSpec(-GOLDEN_BETA, 3)), fs.vectors["w"], 2)
    assert len(chain) == 9
    assert chain.contact_residuals().max() <= 1e-9
    direct = assemble(HelixSpec(-GOLDEN_BETA, 9))
    # the direct chain relabels vertices, so compare as sets of centroids
    np.testing.assert_allclose(chain.centroids(), direct.centroids(), atol=1e-12)


def test_extend_zero_copies_is_identity():
    primitive = assemble(HelixSpec(GOLDEN_BETA, 5))
    assert extend_periodic(primitive, np.zeros(3), 0).tetrahedra == primitive.tetrahedra


def test_extend_with_wrong_translation_fails():
    primitive = assemble(HelixSpec(GOLDEN_BETA, 5))
    with pytest.raises(SeamMismatch):
        extend_periodic(primitive, [0.0, 0.0, 1.0], 1)
    with pytest.raises(ValueError):
        extend_periodic(Chain((), ()), np.zeros(3), 1)


@settings(max_examples=25, deadline=None)
@given(beta=betas, rule=st.sampled_from([FaceRule.right(), FaceRule.left()]))
def test_long_chains_keep_contact_and_edges(beta, rule):
    chain = assemble(HelixSpec(beta, 100, rule))
    assert chain.contact_residuals().max() <= 1e-9
    v = chain.vertices()
    i, j = np.triu_indices(4, 1)
    assert np.abs(np.linalg.norm(v[:, i] - v[:, j], axis=2) - 1).max() <= 1e-9


@settings(max_examples=25, deadline=None)
@given(beta=st.floats(min_value=-math.pi, max_value=math.pi, exclude_min=True, exclude_max=True))
def test_left_rule_with_negated_beta_is_mirror_image(beta):
    right = assemble(HelixSpec(beta, 12, FaceRule.right())).vertices()
    left = assemble(HelixSpec(-beta, 12, FaceRule.left())).vertices()
    # mirror through x = 0; swapping labels 1 and 2 restores orientation
    mirrored = (right * [-1, 1, 1])[:, [0, 2, 1, 3]]
    assert rigid_register(mirrored.reshape(-1, 3), left.reshape(-1, 3))[2] <= 1e-9


@pytest.mark.parametrize("beta, n", [(GOLDEN_BETA, 15), (-GOLDEN_BETA, 9)])
def test_non_adjacent_tetrahedra_stay_apart(beta, n):
    c = assemble(HelixSpec(beta, n)).centroids()
    d = np.linalg.norm(c[:, None] - c[None], axis=2)
    far = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) >= 2
    assert d[far].min() >= 0.3
