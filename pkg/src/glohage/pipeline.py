"""End-to-end wiring: extraction, selection, training and LOPO evaluation."""

import os
from dataclasses import dataclass, field

import numpy as np

from . import dataset as ds
from . import featfile, metrics, mtl, ridge
from . import gloh as gloh_mod
from .errors import EmptyError, RowCountMismatchError


@dataclass
class RunConfig:
    gloh: gloh_mod.GlohParams = field(default_factory=gloh_mod.GlohParams)
    solver: mtl.SolverOptions = field(default_factory=mtl.SolverOptions)
    budget: int = 50
    alpha_grid: tuple = ridge.DEFAULT_ALPHA_GRID
    cs_max: int = 15
    seed: int = 0
    height: int = 68
    width: int = 62
    standardize: bool = False
    age_range: tuple | None = None  # (lo, hi) inclusive years

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


def extract_features(manifest, config=RunConfig(), base_dir="."):
    """Extract GLOH features for every manifest row, in manifest order.

    Relative image paths are resolved against ``base_dir`` (normally the
    manifest's directory).
    """
    from .pgm import check_dims, load_pgm

    if not manifest.samples:
        raise EmptyError("manifest has no rows")
    rows = []
    for s in manifest.samples:
        path = s.image_path
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        img = check_dims(load_pgm(path), config.height, config.width)
        rows.append(gloh_mod.extract_gloh(img, config.gloh))
    return np.array(rows, dtype=np.float32)


def _filter_age_range(manifest, features, age_range):
    if age_range is None:
        return manifest, features
    lo, hi = age_range
    keep = [i for i, s in enumerate(manifest.samples) if lo <= s.age <= hi]
    return ds.Manifest([manifest.samples[i] for i in keep]), features[keep]


def _standardized(features, train_rows):
    mean = features[train_rows].mean(axis=0)
    std = features[train_rows].std(axis=0)
    std[std == 0] = 1.0
    return (features - mean) / std


def _centered_labels(tasks):
    # the selection problem has no intercept; removing the per-task label
    # mean keeps the age offset from swamping the bin correlations
    return [
        mtl.TaskDataset(t.task_id, t.X, t.y - t.y.mean()) for t in tasks
    ]


def select_bins(manifest, features, config=RunConfig(), rows=None):
    """Fit the sparse selection on the given rows (default: all)."""
    if rows is None:
        rows = range(len(manifest.samples))
    tasks = _centered_labels(ds.partition_by_task(rows, manifest, features))
    return mtl.fit_for_budget(tasks, config.budget, config.solver)


def train_model(manifest, features, config=RunConfig(), selection=None, rows=None):
    """Selection (unless given) followed by per-task ridge regressors."""
    if rows is None:
        rows = range(len(manifest.samples))
    if selection is None:
        selection = select_bins(manifest, features, config, rows)
    tasks = ds.partition_by_task(rows, manifest, features)
    task_data = {t.task_id: (t.X, t.y) for t in tasks}
    model = ridge.fit_model(
        selection.selected, task_data, config.alpha_grid, seed=config.seed
    )
    return selection, model


def predict_rows(model, features, manifest=None, rows=None):
    """Predict ages for feature rows; gender (if known) picks the task model."""
    if rows is None:
        rows = range(features.shape[0])
    preds = []
    for r in rows:
        task = ridge.POOLED
        if manifest is not None:
            g = manifest.samples[r].gender
            if g in (ds.MALE, ds.FEMALE):
                task = g
        preds.append(ridge.predict(model, features[r], task))
    return np.array(preds)


def evaluate_lopo(manifest, features, config=RunConfig()):
    """Leave-one-person-out evaluation of the full selection+ridge pipeline."""
    features = np.asarray(features)
    if features.shape[0] != len(manifest.samples):
        raise RowCountMismatchError(
            f"feature rows {features.shape[0]} != manifest size {len(manifest.samples)}"
        )
    manifest, features = _filter_age_range(manifest, features, config.age_range)
    folds = ds.split_lopo(manifest)
    results = []
    for fold in folds:
        feats = (
            _standardized(features, fold.train_rows)
            if config.standardize
            else features
        )
        _, model = train_model(manifest, feats, config, rows=fold.train_rows)
        preds = predict_rows(model, feats, manifest, fold.test_rows)
        truth = np.array(
            [manifest.samples[r].age for r in fold.test_rows], dtype=np.float64
        )
        results.append((fold.held_out_person, preds, truth))
    return metrics.aggregate(results, config.cs_max)


def synth_dataset(spec, out_dir, persons_per_task=None):
    """Write a synthetic benchmark: manifest, GFV1 features and ground truth.

    Real-valued responses are mapped affinely onto integer ages in [0, 69]
    so the manifest satisfies the age contract; the map is recorded in the
    ground-truth file. Tasks 0 and 1 are labeled male and female; further
    tasks get unknown gender. Samples are grouped into persons of up to 5
    images for LOPO splitting. Deterministic per seed.
    """
    data, W, supp = ds.synth_generate(spec)
    os.makedirs(out_dir, exist_ok=True)

    all_y = np.concatenate([d.y for d in data])
    lo, hi = float(all_y.min()), float(all_y.max())
    scale = 69.0 / (hi - lo) if hi > lo else 1.0
    offset = -lo * scale

    samples = []
    rows = []
    genders = [ds.MALE, ds.FEMALE] + [ds.UNKNOWN] * max(0, spec.L - 2)
    idx = 0
    for l, d in enumerate(data):
        featfile.write_features(os.path.join(out_dir, f"features_task{l}.gfv"), d.X)
        for i in range(d.n):
            age = int(round(offset + scale * float(d.y[i])))
            age = min(max(age, 0), 130)
            person = f"p{l}_{i // 5}"
            samples.append(
                ds.Sample(f"synthetic:{idx}", person, age, genders[l])
            )
            rows.append(d.X[i])
            idx += 1
    manifest = ds.Manifest(samples)
    ds.write_manifest(os.path.join(out_dir, "manifest.csv"), manifest)
    featfile.write_features(os.path.join(out_dir, "features.gfv"), np.array(rows))

    with open(os.path.join(out_dir, "truth.txt"), "w", encoding="utf-8") as fh:
        fh.write("GLOHSYNTH 1\n")
        fh.write(f"seed={spec.seed}\n")
        fh.write(f"sigma={spec.noise_sigma!r}\n")
        fh.write(f"age_scale={scale!r}\n")
        fh.write(f"age_offset={offset!r}\n")
        for k in supp:
            ws = " ".join(repr(float(v)) for v in W[k])
            fh.write(f"{int(k)} {ws}\n")
    return manifest
