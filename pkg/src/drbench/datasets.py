"""Manifest-driven ingestion of delimiter-separated UCI files.

A manifest (INI format, one section per dataset) maps dataset names to
local files and parsing options. Rows containing the missing-value token
are dropped and counted; labels are encoded by first appearance so the
encoding depends only on the file bytes.
"""

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .numerics import RandomStream


class DatasetError(ValueError):
    """Unparseable file, degenerate class structure, or bad manifest."""


@dataclass
class ManifestEntry:
    """Parsing recipe for one dataset file."""

    name: str
    path: str
    delimiter: str = ","  # single char; " " means any-whitespace split
    has_header: bool = False
    label_column: object = "last"  # column index or "last"
    drop_columns: tuple = ()  # e.g. identifier columns
    missing_token: str = "?"
    extra_paths: tuple = ()  # concatenated after `path` (Segmentation train+test)
    skip_rows: int = 0  # leading junk lines before the header/data
    expected_rows: int = None  # optional post-load sanity checks
    expected_cols: int = None

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise DatasetError(f"[{self.name}] delimiter must be a single character")
        if self.label_column != "last" and self.label_column in self.drop_columns:
            raise DatasetError(f"[{self.name}] label_column is listed in drop_columns")


@dataclass
class Dataset:
    """Uniform labeled-matrix form of one dataset."""

    name: str
    features: np.ndarray  # n x m, float
    labels: np.ndarray  # n ints in [0, n_classes)
    class_names: list  # original label strings, first-appearance order
    dropped_row_count: int = 0

    @property
    def n_classes(self):
        return len(self.class_names)

    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass
class SplitIndices:
    """Disjoint train/test row indices covering one dataset."""

    train: np.ndarray
    test: np.ndarray
    seed: int = 0


def _split_line(line, delimiter):
    if delimiter.isspace():
        return line.split()
    return [f.strip() for f in line.split(delimiter)]


def load_dataset(entry, raw_text=None):
    """Parse raw text (or the manifest entry's files) into a Dataset.

    Rows containing the missing token in any retained column are dropped
    and counted. Labels are encoded 0..K-1 by first appearance.
    """
    if raw_text is not None:
        texts = [raw_text]
    else:
        texts = []
        for p in (entry.path, *entry.extra_paths):
            path = Path(p)
            if not path.exists():
                raise DatasetError(f"[{entry.name}] dataset file not found: {path}")
            texts.append(path.read_text())

    rows = []
    dropped = 0
    for text in texts:
        lines = [ln for ln in text.splitlines() if ln.strip() != ""]
        lines = lines[entry.skip_rows:]
        if entry.has_header and lines:
            lines = lines[1:]
        for line in lines:
            fields = _split_line(line, entry.delimiter)
            rows.append(fields)

    if not rows:
        raise DatasetError(f"[{entry.name}] no data rows found")
    n_cols = len(rows[0])
    label_idx = n_cols - 1 if entry.label_column == "last" else int(entry.label_column)
    keep = [c for c in range(n_cols) if c not in entry.drop_columns and c != label_idx]

    features = []
    raw_labels = []
    for r, fields in enumerate(rows):
        if len(fields) != n_cols:
            raise DatasetError(
                f"[{entry.name}] row {r}: expected {n_cols} fields, got {len(fields)}"
            )
        retained = [fields[c] for c in keep] + [fields[label_idx]]
        if entry.missing_token and entry.missing_token in retained:
            dropped += 1
            continue
        vals = []
        for c in keep:
            try:
                vals.append(float(fields[c]))
            except ValueError:
                raise DatasetError(
                    f"[{entry.name}] row {r}, column {c}: "
                    f"cannot parse {fields[c]!r} as a number"
                ) from None
        features.append(vals)
        raw_labels.append(fields[label_idx])

    class_names = []
    seen = {}
    labels = []
    for lab in raw_labels:
        if lab not in seen:
            seen[lab] = len(class_names)
            class_names.append(lab)
        labels.append(seen[lab])

    if len(class_names) < 2:
        raise DatasetError(f"[{entry.name}] fewer than 2 classes after filtering")

    X = np.asarray(features, dtype=float)
    if not np.all(np.isfinite(X)):
        raise DatasetError(f"[{entry.name}] non-finite feature values after parsing")
    if entry.expected_rows is not None and X.shape[0] != entry.expected_rows:
        raise DatasetError(
            f"[{entry.name}] expected {entry.expected_rows} rows, got {X.shape[0]}"
        )
    if entry.expected_cols is not None and X.shape[1] != entry.expected_cols:
        raise DatasetError(
            f"[{entry.name}] expected {entry.expected_cols} feature columns, "
            f"got {X.shape[1]}"
        )
    return Dataset(entry.name, X, np.asarray(labels, dtype=int), class_names, dropped)


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def stratified_split(ds, test_fraction=0.1, rng=None, seed=0):
    """Seeded stratified split: per class, round(frac * n_c) test samples,
    clamped so at least one training sample remains.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError("test_fraction must be in (0, 1)")
    if rng is None:
        rng = RandomStream(seed)
    else:
        seed = rng.seed
    sizes = ds.class_sizes()
    if np.any(sizes < 2):
        bad = int(np.argmin(sizes))
        raise DatasetError(
            f"[{ds.name}] class {ds.class_names[bad]!r} has fewer than 2 samples"
        )
    train, test = [], []
    for c in range(ds.n_classes):
        members = np.flatnonzero(ds.labels == c)
        n_c = len(members)
        n_test = min(max(_round_half_up(test_fraction * n_c), 0), n_c - 1)
        order = rng.shuffle(members.tolist())
        test.extend(order[:n_test])
        train.extend(order[n_test:])
    return SplitIndices(
        np.array(sorted(train), dtype=int), np.array(sorted(test), dtype=int), seed
    )


_ENTRY_KEYS = {
    "path", "delimiter", "has_header", "label_column", "drop_columns",
    "missing_token", "extra_paths", "skip_rows", "expected_rows", "expected_cols",
}


def read_manifest(path):
    """Read an INI manifest into a list of ManifestEntry.

    Each section is one dataset; unknown keys raise so typos surface.
    Paths are resolved relative to the manifest's directory.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"manifest not found: {path}")
    parser = configparser.ConfigParser()
    parser.read(path)
    base = path.parent
    entries = []
    for name in parser.sections():
        sec = parser[name]
        unknown = set(sec) - _ENTRY_KEYS
        if unknown:
            raise DatasetError(f"[{name}] unknown manifest key(s): {sorted(unknown)}")
        if "path" not in sec:
            raise DatasetError(f"[{name}] manifest section missing 'path'")
        delim = sec.get("delimiter", ",")
        if delim == "whitespace":
            delim = " "
        label_col = sec.get("label_column", "last")
        if label_col != "last":
            label_col = int(label_col)
        drop = tuple(
            int(t) for t in sec.get("drop_columns", "").replace(",", " ").split()
        )
        extra = tuple(
            str(base / p) for p in sec.get("extra_paths", "").split() if p
        )
        entries.append(
            ManifestEntry(
                name=name,
                path=str(base / sec["path"]),
                delimiter=delim,
                has_header=sec.getboolean("has_header", False),
                label_column=label_col,
                drop_columns=drop,
                missing_token=sec.get("missing_token", "?"),
                extra_paths=extra,
                skip_rows=sec.getint("skip_rows", 0),
                expected_rows=sec.getint("expected_rows", None),
                expected_cols=sec.getint("expected_cols", None),
            )
        )
    if not entries:
        raise DatasetError(f"manifest {path} defines no datasets")
    return entries
