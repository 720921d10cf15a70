import numpy as np
import pytest

from dcsim import dc
from dcsim.datasets import LabeledDataset
from dcsim.errors import InvalidArgumentError


def random_user(n, m, seed, label=None):
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, m))
    if label is None:
        labels = rng.integers(0, 2, n)
    else:
        labels = np.full(n, label)
    return LabeledDataset(features, labels)


def random_anchor(n, m, seed):
    rng = np.random.default_rng(seed)
    return LabeledDataset(rng.random((n, m)), np.full(n, -1))


class TestFitProjection:
    def test_output_shape_and_orthonormal_weights(self):
        x = np.random.default_rng(0).normal(size=(30, 10))
        f = dc.fit_projection(x, 4)
        assert f.apply(x).shape == (30, 4)
        np.testing.assert_allclose(f.weights.T @ f.weights, np.eye(4), atol=1e-10)

    def test_projected_data_is_centered(self):
        x = np.random.default_rng(1).normal(size=(25, 8))
        f = dc.fit_projection(x, 3)
        assert np.abs(f.apply(x).mean(axis=0)).max() <= 1e-12

    def test_captures_dominant_direction(self):
        # Rank-1 signal plus small noise: the 1-D reduction must keep nearly
        # all the variance.
        rng = np.random.default_rng(2)
        x = np.outer(rng.normal(size=40), rng.normal(size=6)) * 10
        x += rng.normal(size=x.shape) * 0.01
        f = dc.fit_projection(x, 1)
        centered = x - x.mean(axis=0)
        kept = np.linalg.norm(f.apply(x)) ** 2
        total = np.linalg.norm(centered) ** 2
        assert kept / total > 0.999

    def test_zero_variance_rejected(self):
        with pytest.raises(InvalidArgumentError, match="zero-variance"):
            dc.fit_projection(np.ones((5, 4)), 2)

    def test_k_must_reduce_dimension(self):
        x = np.random.default_rng(3).normal(size=(10, 4))
        with pytest.raises(InvalidArgumentError):
            dc.fit_projection(x, 4)
        with pytest.raises(InvalidArgumentError):
            dc.fit_projection(x, 0)


class TestUserPhase:
    def test_dc_bundle_shapes(self):
        user = random_user(20, 12, 0)
        anchor = random_anchor(15, 12, 1)
        b = dc.dc_user_phase(user, anchor, k=5, user_id=2)
        assert b.user_id == 2
        assert b.x_tilde.shape == (20, 5)
        assert b.x_anc_tilde.shape == (15, 5)
        assert b.k_total == 5

    def test_anchor_intermediate_is_centered(self):
        b = dc.dc_user_phase(random_user(20, 12, 0), random_anchor(15, 12, 1), k=5)
        assert np.abs(b.x_anc_tilde.mean(axis=0)).max() <= 1e-12

    def test_shared_frame_preserves_user_offsets(self):
        # Two single-label users whose data clouds sit at different offsets:
        # after shifting by the anchor frame the offset must survive in the
        # data intermediates rather than being normalized away per user.
        rng = np.random.default_rng(4)
        m = 10
        anchor = random_anchor(30, m, 5)
        base = rng.normal(size=(15, m)) * 0.1
        lo = LabeledDataset(base + 0.0, np.zeros(15, dtype=int))
        hi = LabeledDataset(base + 2.0, np.ones(15, dtype=int))
        b_lo = dc.dc_user_phase(lo, anchor, k=3, user_id=0)
        b_hi = dc.dc_user_phase(hi, anchor, k=3, user_id=1)
        gap = np.linalg.norm(b_hi.x_tilde.mean(axis=0) - b_lo.x_tilde.mean(axis=0))
        assert gap > 0.5

    def test_dcpd_concatenates_both_paths(self):
        user = random_user(18, 20, 6)
        anchor = random_anchor(25, 20, 7)
        pool = random_user(40, 20, 8)
        b = dc.dcpd_user_phase(user, anchor, pool, k1=4, k2=3)
        assert b.k_total == 7
        assert len(b.projections) == 2
        assert b.projections[0].out_dim == 4
        assert b.projections[1].out_dim == 3

    def test_dcpd_dimension_budget_enforced(self):
        user = random_user(18, 8, 6)
        anchor = random_anchor(25, 8, 7)
        pool = random_user(40, 8, 8)
        with pytest.raises(InvalidArgumentError, match="k1\\+k2"):
            dc.dcpd_user_phase(user, anchor, pool, k1=4, k2=4)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(InvalidArgumentError):
            dc.dc_user_phase(random_user(10, 6, 0), random_anchor(8, 7, 1), k=2)


class TestServerCollaboration:
    def make_bundles(self, n_users=3, k=4, m=12, n_anchor=20):
        anchor = random_anchor(n_anchor, m, 99)
        return [
            dc.dc_user_phase(random_user(15, m, 10 + u), anchor, k=k, user_id=u)
            for u in range(n_users)
        ]

    def test_pooled_shapes(self):
        bundles = self.make_bundles()
        model = dc.server_collaboration(bundles, k_collab=6)
        assert model.n_users == 3
        assert model.x_hat.shape == (45, 6)
        assert model.y.size == 45
        assert model.u1.shape == (20, 6)
        assert all(g.shape == (4, 6) for g in model.g)

    def test_alignment_maps_anchor_intermediates_close_to_target(self):
        # Each G_i is the least-squares map from that user's anchor
        # intermediate onto the shared target, so residuals must be no
        # larger than for any alternative linear map (here: zero map).
        bundles = self.make_bundles()
        model = dc.server_collaboration(bundles, k_collab=6)
        for b, g in zip(bundles, model.g):
            res = np.linalg.norm(b.x_anc_tilde @ g - model.u1)
            assert res < np.linalg.norm(model.u1)

    def test_users_agree_on_anchor_after_alignment(self):
        # All users' data lie in one shared k-dimensional subspace, so every
        # projection spans the same row space and the alignment maps can
        # reproduce the shared target exactly.
        rng = np.random.default_rng(20)
        m, k = 10, 4
        basis = rng.normal(size=(k, m))
        anchor = random_anchor(40, m, 21)
        bundles = []
        for u in range(3):
            latent = rng.normal(size=(30, k))
            user = LabeledDataset(latent @ basis, rng.integers(0, 2, 30))
            bundles.append(dc.dc_user_phase(user, anchor, k=k, user_id=u))
        model = dc.server_collaboration(bundles, k_collab=4)
        mapped = [b.x_anc_tilde @ g for b, g in zip(bundles, model.g)]
        for other in mapped[1:]:
            np.testing.assert_allclose(other, mapped[0], atol=1e-8)

    def test_x_hat_rows_match_per_user_transform_of_training_data(self):
        bundles = self.make_bundles()
        model = dc.server_collaboration(bundles, k_collab=5)
        start = 0
        for u, b in enumerate(bundles):
            block = model.x_hat[start : start + b.x_tilde.shape[0]]
            np.testing.assert_allclose(block, b.x_tilde @ model.g[u], atol=1e-12)
            start += b.x_tilde.shape[0]

    def test_k_collab_out_of_range(self):
        bundles = self.make_bundles(n_users=2, k=3)
        with pytest.raises(InvalidArgumentError):
            dc.server_collaboration(bundles, k_collab=7)

    def test_anchor_row_count_mismatch_rejected(self):
        b1 = dc.dc_user_phase(random_user(10, 8, 0), random_anchor(12, 8, 1), k=3)
        b2 = dc.dc_user_phase(random_user(10, 8, 2), random_anchor(13, 8, 3), k=3)
        with pytest.raises(InvalidArgumentError):
            dc.server_collaboration([b1, b2], k_collab=3)

    def test_empty_bundles_rejected(self):
        with pytest.raises(InvalidArgumentError):
            dc.server_collaboration([], k_collab=2)


class TestTransformTest:
    def test_matches_training_transform_on_training_data(self):
        anchor = random_anchor(20, 10, 30)
        user = random_user(12, 10, 31)
        b = dc.dc_user_phase(user, anchor, k=4, user_id=0)
        model = dc.server_collaboration([b], k_collab=3)
        out = dc.transform_test(model, 0, user.features)
        np.testing.assert_allclose(out, model.x_hat, atol=1e-12)

    def test_dcpd_path_matches_training_transform(self):
        anchor = random_anchor(25, 14, 40)
        user = random_user(16, 14, 41)
        pool = random_user(30, 14, 42)
        b = dc.dcpd_user_phase(user, anchor, pool, k1=4, k2=3, user_id=0)
        model = dc.server_collaboration([b], k_collab=5)
        out = dc.transform_test(model, 0, user.features)
        np.testing.assert_allclose(out, model.x_hat, atol=1e-12)

    def test_empty_input_gives_empty_output(self):
        b = dc.dc_user_phase(random_user(10, 8, 0), random_anchor(12, 8, 1), k=3)
        model = dc.server_collaboration([b], k_collab=2)
        out = dc.transform_test(model, 0, np.zeros((0, 8)))
        assert out.shape == (0, 2)

    def test_unknown_user_rejected(self):
        b = dc.dc_user_phase(random_user(10, 8, 0), random_anchor(12, 8, 1), k=3)
        model = dc.server_collaboration([b], k_collab=2)
        with pytest.raises(InvalidArgumentError):
            dc.transform_test(model, 1, np.zeros((2, 8)))
