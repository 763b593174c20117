import numpy as np
import pytest

from conftest import pixel_bundle
from sixpoint.errors import InsufficientObservationsError
from sixpoint.estimation import assemble_Z, condition_frames, estimate_s, fix_sign


def same_up_to_sign(a, b, tol):
    return min(np.max(np.abs(a - b)), np.max(np.abs(a + b))) <= tol


def test_exact_bundle_has_rank_four(rng):
    bundle, _ = pixel_bundle(rng, 30)
    Z = assemble_Z(bundle)
    assert Z.B == 30
    np.testing.assert_allclose(np.linalg.norm(Z.rows, axis=1), 1.0)
    sv = np.linalg.svd(Z.rows, compute_uv=False)
    assert sv[4] < 1e-8 * sv[0]


def test_too_few_frames(rng):
    bundle, _ = pixel_bundle(rng, 3)
    with pytest.raises(InsufficientObservationsError):
        assemble_Z(bundle)
    with pytest.raises(InsufficientObservationsError):
        estimate_s(np.ones((3, 5)))


def test_coincident_points_drop_a_frame(rng):
    bundle, _ = pixel_bundle(rng, 10)
    bundle[3, 4] = bundle[1, 4]
    Z = assemble_Z(bundle)
    assert Z.B == 9 and 4 not in Z.frames


def test_conditioning_is_isotropic(rng):
    bundle, _ = pixel_bundle(rng, 5)
    y, scale = condition_frames(bundle)
    assert y.shape == (5, 6, 3)
    np.testing.assert_allclose(y[..., :2].mean(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(np.sqrt(np.mean(np.sum(y[..., :2] ** 2, -1), -1)), np.sqrt(2))
    pix = np.swapaxes(bundle, 0, 1)
    centred = pix - pix.mean(axis=1, keepdims=True)
    np.testing.assert_allclose(y[..., :2], centred * scale[:, None, None])


def test_recovers_true_signature(rng):
    for _ in range(20):
        bundle, s_true = pixel_bundle(rng, 30)
        est = estimate_s(assemble_Z(bundle))
        assert np.linalg.norm(est.s) == pytest.approx(1.0)
        assert same_up_to_sign(est.s, s_true, 1e-6)
        assert not est.ill_conditioned


def test_sign_convention():
    np.testing.assert_allclose(fix_sign([0, -1, 2]), [0, 1, -2])
    np.testing.assert_allclose(fix_sign([[-1, 0], [2, 3]]), [[1, 0], [2, 3]])
    rows = np.random.default_rng(3).normal(size=(10, 5))
    s = estimate_s(rows).s
    assert s[np.argmax(np.abs(s) > 1e-12)] > 0


def test_three_dimensional_rows_are_ill_conditioned(rng):
    basis = rng.normal(size=(3, 5))
    rows = rng.normal(size=(12, 3)) @ basis
    assert estimate_s(rows).ill_conditioned


def test_matches_eigendecomposition(rng):
    for _ in range(50):
        Z = rng.normal(size=(rng.integers(4, 40), 5))
        w, v = np.linalg.eigh(Z.T @ Z)
        assert same_up_to_sign(estimate_s(Z).s, v[:, 0], 1e-9)


def test_tls_optimality(rng):
    Z = rng.normal(size=(25, 5))
    s = estimate_s(Z).s
    v = rng.normal(size=(1000, 5))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    assert np.linalg.norm(Z @ s) <= np.min(np.linalg.norm(v @ Z.T, axis=1)) + 1e-12


def test_row_permutation_and_duplicates(rng):
    Z = rng.normal(size=(15, 5))
    s = estimate_s(Z).s
    assert same_up_to_sign(estimate_s(Z[rng.permutation(15)]).s, s, 1e-9)
    # duplicating every row scales Z^T Z by 2 and leaves the null direction alone
    assert same_up_to_sign(estimate_s(np.vstack([Z, Z])).s, s, 1e-9)


def test_per_frame_isotropic_scaling(rng):
    bundle, _ = pixel_bundle(rng, 20)
    s = estimate_s(assemble_Z(bundle)).s
    factors = rng.uniform(0.2, 5.0, size=20)
    shifted = bundle * factors[None, :, None] + rng.normal(size=(1, 20, 2)) * 50
    assert same_up_to_sign(estimate_s(assemble_Z(shifted)).s, s, 1e-7)
