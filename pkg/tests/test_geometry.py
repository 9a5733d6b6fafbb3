import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tetrahelix.errors import DegenerateFace
from tetrahelix.geometry import (
    GOLDEN_BETA,
    PHI,
    Tetrahedron,
    apply_A,
    apply_B,
    face_frame,
    face_indices,
    reference_tetrahedron,
    reflection_across_face,
    rotation_about_normal,
    step,
)
from tetrahelix.fixtures import load

s3, s5, s6 = math.sqrt(3), math.sqrt(5), math.sqrt(6)
betas = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False, exclude_min=True)
faces = st.integers(0, 3)


def test_golden_beta_cosine():
    assert math.cos(GOLDEN_BETA) == pytest.approx((1 + 3 * s5) / 8, abs=1e-15)
    assert math.cos(GOLDEN_BETA) == pytest.approx((3 * PHI - 1) / 4, abs=1e-15)


def test_tetrahedron_rejects_wrong_edges():
    with pytest.raises(ValueError):
        Tetrahedron(np.eye(4)[:, :3])
    with pytest.raises(ValueError):
        Tetrahedron(np.zeros((3, 3)))


def test_tetrahedron_is_read_only():
    t = reference_tetrahedron()
    with pytest.raises(ValueError):
        t.vertices[0, 0] = 1.0


def test_face_indices():
    assert face_indices(2) == [0, 1, 3]
    with pytest.raises(ValueError):
        face_indices(4)


def test_bottom_face_centre_of_seed():
    frame = face_frame(reference_tetrahedron(), 0)
    np.testing.assert_allclose(frame.center, [0, 0, -1 / (2 * s6)], atol=1e-15)
    np.testing.assert_allclose(frame.outward_normal, [0, 0, -1], atol=1e-15)


def test_appending_face_centre_of_second_tetrahedron():
    t1 = load("5bc").tetrahedron("T1")
    expected = (-(1 + 3 * s5) / (24 * s3), math.sqrt((3 - s5) / 2) / 12, -7 / (6 * s6))
    np.testing.assert_allclose(face_frame(t1, 3).center, expected, atol=1e-12)


@pytest.mark.parametrize("f", range(4))
def test_normals_point_away_from_origin_centred_tetrahedron(f):
    frame = face_frame(reference_tetrahedron(), f)
    assert frame.outward_normal @ frame.center > 0
    assert abs(np.linalg.norm(frame.outward_normal) - 1) <= 1e-12


def test_degenerate_face_detected():
    # bypass the edge check to build a flat simplex
    flat = object.__new__(Tetrahedron)
    object.__setattr__(flat, "vertices", np.array([[0, 0, 1.0], [0, 0, 0], [1, 0, 0], [2, 0, 0]]))
    with pytest.raises(DegenerateFace):
        face_frame(flat, 0)


def test_bottom_reflection_is_diagonal():
    np.testing.assert_array_equal(reflection_across_face(reference_tetrahedron(), 0), np.diag([1.0, 1.0, -1.0]))


def test_second_reflection_corner_entry():
    m = reflection_across_face(load("5bc").tetrahedron("T1"), 3)
    assert m[0, 0] == pytest.approx((-5 - 3 * s5) / 18, abs=1e-12)


def test_first_rotation_corner_entry():
    t0 = reference_tetrahedron()
    r = rotation_about_normal(face_frame(t0, 0), GOLDEN_BETA)
    assert r[0, 0] == pytest.approx((1 + 3 * s5) / 8, abs=1e-12)


def test_rotation_rejects_non_unit_normal():
    frame = face_frame(reference_tetrahedron(), 0)
    bad = type(frame)(frame.center, 2 * frame.outward_normal)
    with pytest.raises(ValueError):
        rotation_about_normal(bad, 0.1)


def test_mirror_of_seed_gives_lowered_apex():
    tp = apply_A(reference_tetrahedron(), 0)
    np.testing.assert_allclose(tp.vertices[0], [0, 0, -math.sqrt(2 / 3) - 1 / (2 * s6)], atol=1e-15)


def test_mirror_of_second_tetrahedron():
    tp = apply_A(load("5bc").tetrahedron("T1"), 3)
    expected = (-(5 / 72) * (s3 + 3 * math.sqrt(15)), (5 / 24) * (s5 - 1), -11 / (6 * s6))
    np.testing.assert_allclose(tp.vertices[3], expected, atol=1e-12)


@pytest.mark.parametrize("sign, key", [(1, "5bc"), (-1, "3bc")])
def test_first_step_matches_closed_form(sign, key):
    t0 = reference_tetrahedron()
    t1 = apply_B(apply_A(t0, 0), face_frame(t0, 0), sign * GOLDEN_BETA)
    np.testing.assert_allclose(t1.vertices, load(key).tetrahedra["T1"], atol=1e-12)


@pytest.mark.parametrize("key, faces", [("5bc", (0, 3, 1, 2)), ("3bc", (0, 3))])
def test_every_listed_pair_is_one_step(key, faces):
    fs = load(key)
    for k, f in enumerate(faces):
        got = step(fs.tetrahedron(f"T{k}"), f, fs.beta)
        assert np.abs(got.vertices - fs.tetrahedra[f"T{k + 1}"]).max() <= 1e-12


@settings(max_examples=60, deadline=None)
@given(beta=betas, f=faces)
def test_rotation_is_proper(beta, f):
    r = rotation_about_normal(face_frame(reference_tetrahedron(), f), beta)
    assert np.abs(r.T @ r - np.eye(3)).max() <= 1e-12
    assert abs(np.linalg.det(r) - 1) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(beta=betas, f=faces)
def test_rotation_inverse_and_zero(beta, f):
    frame = face_frame(reference_tetrahedron(), f)
    there = rotation_about_normal(frame, beta)
    back = rotation_about_normal(frame, -beta)
    assert np.abs(back @ there - np.eye(3)).max() <= 1e-12
    np.testing.assert_allclose(rotation_about_normal(frame, 0.0), np.eye(3), atol=0)


@settings(max_examples=60, deadline=None)
@given(beta=betas, f=faces, g=faces)
def test_mirror_is_improper_involution(beta, f, g):
    t = step(reference_tetrahedron(), g, beta)
    m = reflection_across_face(t, f)
    assert np.abs(m.T @ m - np.eye(3)).max() <= 1e-12
    assert abs(np.linalg.det(m) + 1) <= 1e-12
    assert np.abs(m @ m - np.eye(3)).max() <= 1e-12
    assert np.abs(apply_A(apply_A(t, f), f).vertices - t.vertices).max() <= 1e-12


@settings(max_examples=60, deadline=None)
@given(beta=betas, f=faces)
def test_mirror_keeps_the_face_exactly(beta, f):
    t = step(reference_tetrahedron(), 0, beta)
    tp = apply_A(t, f)
    idx = face_indices(f)
    np.testing.assert_array_equal(tp.vertices[idx], t.vertices[idx])


@settings(max_examples=60, deadline=None)
@given(beta=betas, f=faces)
def test_rotation_keeps_face_in_plane(beta, f):
    t = reference_tetrahedron()
    frame = face_frame(t, f)
    out = apply_B(apply_A(t, f), frame, beta)
    dist = (out.vertices[face_indices(f)] - frame.center) @ frame.outward_normal
    assert np.abs(dist).max() <= 1e-12
    assert np.abs(face_frame(out, f).center - frame.center).max() <= 1e-12


def test_zero_rotation_leaves_mirror_image():
    t = reference_tetrahedron()
    tp = apply_A(t, 2)
    np.testing.assert_allclose(apply_B(tp, face_frame(t, 2), 0.0).vertices, tp.vertices, atol=1e-15)
