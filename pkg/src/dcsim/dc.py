"""Data collaboration pipelines.

User side: fit private dimensionality reductions, build intermediate
representations of the local data and the shared anchor data. Server side:
align all users' anchor intermediates onto a common latent target via SVD
and per-user least-squares maps, then assemble the pooled training set.

Only intermediate representations (plus labels) ever cross the user/server
boundary; raw features stay inside the user phase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset
from .errors import InvalidArgumentError
from .linalg import center_columns, solve_least_squares, truncated_svd

ZERO_VARIANCE_TOL = 1e-12


@dataclass
class Projection:
    """A fitted linear reduction: apply(X) = (X - mean) @ weights."""

    mean: np.ndarray
    weights: np.ndarray

    @property
    def out_dim(self) -> int:
        return self.weights.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.mean.size:
            raise InvalidArgumentError(
                f"expected (*, {self.mean.size}) input, got {x.shape}"
            )
        return (x - self.mean) @ self.weights


@dataclass
class IntermediateBundle:
    """One user's server-bound payload plus the private state kept locally.

    Both matrices are shifted by the anchor intermediate's column means, so
    every user's payload is expressed in a frame where the shared anchor
    cloud is centered; intermediate_mean holds that shift so test data can
    be mapped identically later.
    """

    user_id: int
    x_tilde: np.ndarray
    x_anc_tilde: np.ndarray
    labels: np.ndarray
    projections: list
    intermediate_mean: np.ndarray

    @property
    def k_total(self) -> int:
        return self.x_tilde.shape[1]


@dataclass
class CollaborationModel:
    """Server output: alignment maps, latent target, pooled training set."""

    g: list
    u1: np.ndarray
    x_hat: np.ndarray
    y: np.ndarray
    projections: list  # per user
    intermediate_means: list  # per user

    @property
    def n_users(self) -> int:
        return len(self.g)

    @property
    def k_collab(self) -> int:
        return self.u1.shape[1]


def fit_projection(x, k: int) -> Projection:
    """Centered truncated-SVD reduction to k dimensions (k < n_features)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidArgumentError("expected a 2-D feature matrix")
    if k < 1 or k > min(x.shape) or k >= x.shape[1]:
        raise InvalidArgumentError(
            f"k={k} out of range for a {x.shape[0]}x{x.shape[1]} matrix"
        )
    centered, mean = center_columns(x)
    if np.abs(centered).max() <= ZERO_VARIANCE_TOL:
        raise InvalidArgumentError("zero-variance input: all rows identical")
    svd = truncated_svd(centered, k)
    return Projection(mean=mean, weights=svd.v)


def _bundle(user_id, projections, x, x_anc, labels):
    xt = np.hstack([p.apply(x) for p in projections])
    xat = np.hstack([p.apply(x_anc) for p in projections])
    # Center both intermediates with the anchor intermediate's means. Using
    # each matrix's own means instead would erase a single-label user's class
    # offset, which is the very signal the collaboration step must preserve.
    xat_centered, anc_mean = center_columns(xat)
    return IntermediateBundle(
        user_id=user_id,
        x_tilde=xt - anc_mean,
        x_anc_tilde=xat_centered,
        labels=np.asarray(labels, dtype=np.int64),
        projections=list(projections),
        intermediate_mean=anc_mean,
    )


def dc_user_phase(
    x: LabeledDataset, x_anc: LabeledDataset, k: int, user_id: int = 0
) -> IntermediateBundle:
    """Conventional DC user phase: one reduction fitted on the user's data."""
    if x.feature_dim != x_anc.feature_dim:
        raise InvalidArgumentError("user data and anchor data dims differ")
    f = fit_projection(x.features, k)
    return _bundle(user_id, [f], x.features, x_anc.features, x.labels)


def dcpd_user_phase(
    x: LabeledDataset,
    x_anc: LabeledDataset,
    x_proj: LabeledDataset,
    k1: int,
    k2: int,
    user_id: int = 0,
    fit_primary_on_anchor: bool = False,
) -> IntermediateBundle:
    """DCPd user phase: concatenate a local-data reduction with one fitted on
    the user's projection data.

    fit_primary_on_anchor switches the primary reduction to be fitted on the
    anchor data instead of the user's own data (an alternative reading of the
    protocol, off by default).
    """
    if not (x.feature_dim == x_anc.feature_dim == x_proj.feature_dim):
        raise InvalidArgumentError("feature dims of data, anchor, and pool differ")
    if k1 + k2 >= x.feature_dim:
        raise InvalidArgumentError(
            f"k1+k2={k1 + k2} must be smaller than the raw dimension {x.feature_dim}"
        )
    fit_base = x_anc.features if fit_primary_on_anchor else x.features
    f = fit_projection(fit_base, k1)
    f_p = fit_projection(x_proj.features, k2)
    return _bundle(user_id, [f, f_p], x.features, x_anc.features, x.labels)


def server_collaboration(bundles, k_collab: int) -> CollaborationModel:
    """Align user bundles into a shared latent space and pool the training set."""
    if not bundles:
        raise InvalidArgumentError("need at least one bundle")
    a = bundles[0].x_anc_tilde.shape[0]
    for b in bundles:
        if b.x_anc_tilde.shape[0] != a:
            raise InvalidArgumentError("bundles disagree on anchor row count")
    anc_concat = np.hstack([b.x_anc_tilde for b in bundles])
    if k_collab < 1 or k_collab > min(anc_concat.shape):
        raise InvalidArgumentError(
            f"k_collab={k_collab} out of range for a "
            f"{anc_concat.shape[0]}x{anc_concat.shape[1]} anchor concatenation"
        )
    u1 = truncated_svd(anc_concat, k_collab).u
    g = [solve_least_squares(b.x_anc_tilde, u1) for b in bundles]
    x_hat = np.vstack([b.x_tilde @ gi for b, gi in zip(bundles, g)])
    y = np.concatenate([b.labels for b in bundles])
    return CollaborationModel(
        g=g,
        u1=u1,
        x_hat=x_hat,
        y=y,
        projections=[b.projections for b in bundles],
        intermediate_means=[b.intermediate_mean for b in bundles],
    )


def transform_test(model: CollaborationModel, user_id: int, x_test) -> np.ndarray:
    """Map raw test features through one user's projection path into the
    collaboration space; mirrors that user's training-time transformation."""
    if not (0 <= user_id < model.n_users):
        raise InvalidArgumentError(f"unknown user_id {user_id}")
    x_test = np.asarray(x_test, dtype=np.float64)
    projections = model.projections[user_id]
    if x_test.shape[0] == 0:
        return np.zeros((0, model.k_collab))
    z = np.hstack([p.apply(x_test) for p in projections])
    z = z - model.intermediate_means[user_id]
    return z @ model.g[user_id]
