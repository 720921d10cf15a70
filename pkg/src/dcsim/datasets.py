"""Dataset representation, file I/O, partitioning, and anchor/projection sourcing.

A dataset is a dense float64 feature matrix with integer labels; the label
-1 marks unlabeled rows (anchor/projection pools). Fingerprint datasets are
0/1-valued and serialized as sparse set-bit index lists.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError, InvalidArgumentError

UNLABELED = -1

_HEADER_PREFIX = "#dcsim-dataset v1 m="


@dataclass
class LabeledDataset:
    """Feature matrix (n_samples x feature_dim) with {0,1,-1} labels."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise InvalidArgumentError("features must be 2-D")
        if self.labels.shape != (self.features.shape[0],):
            raise InvalidArgumentError(
                f"labels length {self.labels.shape} does not match "
                f"{self.features.shape[0]} samples"
            )
        if not np.all(np.isin(self.labels, (0, 1, UNLABELED))):
            raise InvalidArgumentError("labels must be 0, 1, or unlabeled (-1)")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[indices], self.labels[indices])

    def without_labels(self) -> "LabeledDataset":
        return LabeledDataset(
            self.features, np.full(self.n_samples, UNLABELED, dtype=np.int64)
        )


@dataclass
class PartitionPlan:
    """Per-user sample index assignment of a training set."""

    n_users: int
    assignments: list
    seed: int
    bias_r: float | None = None

    def __post_init__(self):
        seen = set()
        for idx in self.assignments:
            s = set(int(i) for i in idx)
            if seen & s:
                raise InvalidArgumentError("partition assignments overlap")
            seen |= s

    def plan_hash(self) -> str:
        h = hashlib.sha256()
        for idx in self.assignments:
            h.update(b"|")
            h.update(",".join(str(int(i)) for i in idx).encode())
        return h.hexdigest()


@dataclass
class AnchorSpec:
    """How to source shared anchor data.

    strategy: "uniform01", "binary01", or "pool-sample".
    """

    strategy: str
    count: int
    seed: int
    pool_path: str | None = None
    binary_density: float = 0.5

    def __post_init__(self):
        if self.strategy not in ("uniform01", "binary01", "pool-sample"):
            raise InvalidArgumentError(f"unknown anchor strategy {self.strategy!r}")
        if (self.pool_path is not None) != (self.strategy == "pool-sample"):
            raise InvalidArgumentError(
                "pool_path must be given exactly when strategy is pool-sample"
            )
        if self.count < 1:
            raise InvalidArgumentError("anchor count must be >= 1")


def load_dataset(path) -> LabeledDataset:
    """Parse the v1 sparse-bit dataset format; see `save_dataset` for the layout."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(_HEADER_PREFIX):
            raise DatasetFormatError(f"bad header {header!r}", line=1)
        try:
            m = int(header[len(_HEADER_PREFIX):])
        except ValueError:
            raise DatasetFormatError(f"bad feature dim in header {header!r}", line=1)
        if m < 1:
            raise DatasetFormatError("feature dim must be >= 1", line=1)
        rows = []
        labels = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DatasetFormatError("expected '<label>\\t<bits>'", line=lineno)
            token, bits = parts
            if token == "?":
                labels.append(UNLABELED)
            elif token in ("0", "1"):
                labels.append(int(token))
            else:
                raise DatasetFormatError(f"bad label token {token!r}", line=lineno)
            row = np.zeros(m, dtype=np.float64)
            if bits:
                prev = -1
                for part in bits.split(","):
                    try:
                        b = int(part)
                    except ValueError:
                        raise DatasetFormatError(
                            f"bad bit index {part!r}", line=lineno
                        )
                    if b < 0 or b >= m:
                        raise DatasetFormatError(
                            f"bit index {b} out of range [0, {m})", line=lineno
                        )
                    if b <= prev:
                        raise DatasetFormatError(
                            "bit indices must be strictly ascending", line=lineno
                        )
                    row[b] = 1.0
                    prev = b
            rows.append(row)
    features = (
        np.asarray(rows) if rows else np.zeros((0, m), dtype=np.float64)
    )
    return LabeledDataset(features, np.asarray(labels, dtype=np.int64))


def save_dataset(d: LabeledDataset, path) -> None:
    """Write a binary-feature dataset; round-trips exactly through load_dataset."""
    if not np.all((d.features == 0) | (d.features == 1)):
        raise InvalidArgumentError("dataset format stores binary features only")
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{_HEADER_PREFIX}{d.feature_dim}\n")
        for i in range(d.n_samples):
            label = d.labels[i]
            token = "?" if label == UNLABELED else str(int(label))
            bits = ",".join(str(b) for b in np.flatnonzero(d.features[i]))
            fh.write(f"{token}\t{bits}\n")


def save_matrix_csv(a: np.ndarray, path) -> None:
    """Debug export of a real matrix: CSV, 17 significant digits."""
    np.savetxt(path, np.asarray(a, dtype=np.float64), delimiter=",", fmt="%.17g")


def _largest_remainder(total: int, fractions) -> np.ndarray:
    """Apportion `total` into integer counts proportional to `fractions`."""
    fractions = np.asarray(fractions, dtype=np.float64)
    exact = fractions * total
    counts = np.floor(exact).astype(np.int64)
    short = total - int(counts.sum())
    # Deterministic tie-break: larger remainder first, then lower index.
    order = sorted(range(len(fractions)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def split_train_valid_test(d: LabeledDataset, fractions, seed: int):
    """Label-stratified three-way split with sizes within 1 of fraction*n."""
    fractions = np.asarray(fractions, dtype=np.float64)
    if fractions.shape != (3,) or np.any(fractions <= 0):
        raise InvalidArgumentError("fractions must be three positive reals")
    if abs(fractions.sum() - 1.0) > 1e-9:
        raise InvalidArgumentError("fractions must sum to 1")
    sizes = _largest_remainder(d.n_samples, fractions)
    if np.any(sizes == 0):
        raise InvalidArgumentError("a split would be empty")

    rng = np.random.default_rng(seed)
    # Shuffle within each label group, then interleave groups by fractional
    # rank so every prefix is label-stratified within one sample per class.
    keys = []
    for label in sorted(set(d.labels.tolist())):
        idx = np.flatnonzero(d.labels == label)
        rng.shuffle(idx)
        for pos, i in enumerate(idx):
            keys.append(((pos + 0.5) / idx.size, label, int(i)))
    keys.sort()
    ordered = np.asarray([i for _, _, i in keys], dtype=np.int64)

    a, b = int(sizes[0]), int(sizes[0] + sizes[1])
    return d.subset(ordered[:a]), d.subset(ordered[a:b]), d.subset(ordered[b:])


def partition_iid(d: LabeledDataset, n_users: int, seed: int) -> PartitionPlan:
    """Shuffle and deal samples so user sizes differ by at most one."""
    if n_users < 2:
        raise InvalidArgumentError("need at least 2 users")
    if d.n_samples < n_users:
        raise InvalidArgumentError("fewer samples than users")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(d.n_samples)
    assignments = [sorted(perm[u::n_users].tolist()) for u in range(n_users)]
    return PartitionPlan(n_users=n_users, assignments=assignments, seed=seed)


def partition_label_bias(d: LabeledDataset, r: float, seed: int) -> PartitionPlan:
    """Four-user label-skew split.

    Label-0 samples go to users 1..4 in proportions (25+25r)%, (25+25r)%,
    (25-25r)%, (25-25r)%; label-1 samples in the complementary proportions.
    Counts are apportioned by largest remainder so each label's total is
    conserved exactly. r=0 is IID; r=1 gives single-label users.
    """
    if not (0.0 <= r <= 1.0):
        raise InvalidArgumentError("r must lie in [0, 1]")
    if np.any(d.labels == UNLABELED):
        raise InvalidArgumentError("label-bias partitioning needs a fully labeled set")
    idx0 = np.flatnonzero(d.labels == 0)
    idx1 = np.flatnonzero(d.labels == 1)
    if idx0.size == 0 or idx1.size == 0:
        raise InvalidArgumentError("both classes must be present")

    hi = (25 + 25 * r) / 100.0
    lo = (25 - 25 * r) / 100.0
    props0 = [hi, hi, lo, lo]
    props1 = [lo, lo, hi, hi]

    rng = np.random.default_rng(seed)
    rng.shuffle(idx0)
    rng.shuffle(idx1)
    counts0 = _largest_remainder(idx0.size, props0)
    counts1 = _largest_remainder(idx1.size, props1)

    assignments = []
    o0 = o1 = 0
    for u in range(4):
        chunk = np.concatenate(
            [idx0[o0 : o0 + counts0[u]], idx1[o1 : o1 + counts1[u]]]
        )
        o0 += counts0[u]
        o1 += counts1[u]
        assignments.append(sorted(int(i) for i in chunk))
    return PartitionPlan(n_users=4, assignments=assignments, seed=seed, bias_r=r)


def generate_anchor(spec: AnchorSpec, m: int) -> LabeledDataset:
    """Produce an unlabeled anchor dataset per the given strategy."""
    rng = np.random.default_rng(spec.seed)
    if spec.strategy == "uniform01":
        features = rng.random((spec.count, m))
    elif spec.strategy == "binary01":
        features = (rng.random((spec.count, m)) < spec.binary_density).astype(
            np.float64
        )
    else:
        pool = load_dataset(spec.pool_path)
        if pool.feature_dim != m:
            raise InvalidArgumentError(
                f"pool feature dim {pool.feature_dim} != requested {m}"
            )
        if pool.n_samples < spec.count:
            raise InvalidArgumentError(
                f"pool has {pool.n_samples} rows, need {spec.count}"
            )
        idx = rng.choice(pool.n_samples, size=spec.count, replace=False)
        features = pool.features[idx]
    labels = np.full(spec.count, UNLABELED, dtype=np.int64)
    return LabeledDataset(features, labels)


def generate_anchor_from_pool(
    pool: LabeledDataset, count: int, seed: int
) -> LabeledDataset:
    """pool-sample anchors from an already-loaded pool."""
    if pool.n_samples < count:
        raise InvalidArgumentError(f"pool has {pool.n_samples} rows, need {count}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(pool.n_samples, size=count, replace=False)
    return pool.subset(idx).without_labels()


def sample_projection_data(
    pool: LabeledDataset, b: int, user_seed: int
) -> LabeledDataset:
    """Draw b pool rows without replacement; each user uses its own seed."""
    if b > pool.n_samples:
        raise InvalidArgumentError(f"requested {b} rows from a {pool.n_samples}-row pool")
    rng = np.random.default_rng(user_seed)
    idx = rng.choice(pool.n_samples, size=b, replace=False)
    return pool.subset(idx).without_labels()


def generate_synthetic_fingerprint_dataset(
    n_per_class: int,
    m: int,
    template_density: float,
    flip_prob: float,
    seed: int,
) -> LabeledDataset:
    """Two-template binary fingerprint task.

    Each class has a random template bit vector; samples are the template
    with independent bit flips at flip_prob. Labels are balanced.
    """
    if m < 8:
        raise InvalidArgumentError("m must be >= 8")
    if not (0.0 < template_density < 1.0):
        raise InvalidArgumentError("template_density must lie in (0, 1)")
    if not (0.0 <= flip_prob < 0.5):
        raise InvalidArgumentError("flip_prob must lie in [0, 0.5)")
    if n_per_class < 1:
        raise InvalidArgumentError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    templates = (rng.random((2, m)) < template_density).astype(np.float64)
    labels = np.repeat(np.array([0, 1], dtype=np.int64), n_per_class)
    flips = rng.random((2 * n_per_class, m)) < flip_prob
    features = np.abs(templates[labels] - flips.astype(np.float64))
    return LabeledDataset(features, labels)
