"""Benchmark pipeline: load, standardize, embed, split, classify, score.

Protocol (documented in every emitted report): each dataset is
standardized and embedded as a whole to d = ceil(m/2) before the
stratified 90/10 split, because neither t-SNE nor classical MDS has an
out-of-sample map. t-SNE is re-run per repeat seed (random init); MDS is
deterministic and embedded once per dataset with only the split
reseeded. Row order in all outputs is fixed by sorting keys, so two runs
with the same config and base seed produce byte-identical reports.
"""

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .datasets import DatasetError, load_dataset, read_manifest, stratified_split
from .mds import ClassicalMDS
from .metrics import score_row
from .neighbors import ENNClassifier, KNNClassifier
from .numerics import RandomStream, standardize
from .svm import LinearSVM
from .tsne import TSNE

PROTOCOL_NOTE = (
    "Protocol: features standardized (population variance), full dataset "
    "embedded to d = ceil(m/2) BEFORE the stratified 90/10 split (the "
    "embedding is transductive, so test rows share the fit; this label-free "
    "leakage is inherent to the protocol). Scores are averaged over repeats "
    "with reseeded splits; t-SNE is re-embedded per seed."
)


@dataclass
class EvalRow:
    dataset: str
    dr_method: str
    classifier: str
    seed: int
    accuracy: float
    f_measure: float
    g_mean: float
    runtime: float  # seconds; reported separately to keep report.csv deterministic
    final_cost: float  # final KL (t-SNE) or strain (MDS)
    n_clamped: int  # clamped negative eigenvalues (MDS only)
    dropped_rows: int


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (dataset, error message)

    def aggregates(self):
        """Per (dataset, dr, classifier): mean and population std of scores."""
        groups = {}
        for r in self.rows:
            groups.setdefault((r.dataset, r.dr_method, r.classifier), []).append(r)
        out = []
        for key in sorted(groups):
            rs = groups[key]
            for stat, fn in (("mean", np.mean), ("std", np.std)):
                out.append(
                    (
                        *key,
                        stat,
                        float(fn([r.accuracy for r in rs])),
                        float(fn([r.f_measure for r in rs])),
                        float(fn([r.g_mean for r in rs])),
                    )
                )
        return out

    def mean_score(self, dataset, dr_method, classifier, which="accuracy"):
        vals = [
            getattr(r, which)
            for r in self.rows
            if (r.dataset, r.dr_method, r.classifier) == (dataset, dr_method, classifier)
        ]
        if not vals:
            raise KeyError((dataset, dr_method, classifier))
        return float(np.mean(vals))


def make_classifier(name, config):
    if name == "knn":
        return KNNClassifier(n_neighbors=config.k)
    if name == "enn":
        return ENNClassifier(n_neighbors=config.k)
    if name == "svm":
        return LinearSVM(C=config.svm_c, random_state=config.seed)
    raise ValueError(f"unknown classifier {name!r}")


def embed(X_std, method, d, config, seed):
    """Embed standardized features; returns (Y, final_cost, n_clamped)."""
    if method == "mds":
        mds = ClassicalMDS(n_components=d)
        Y = mds.fit_transform(X_std)
        return Y, mds.strain_, mds.n_clamped_
    if method == "tsne":
        ts = TSNE(
            n_components=d,
            perplexity=config.perplexity,
            n_iter=config.iterations,
            learning_rate=config.learning_rate,
            random_state=seed,
        )
        Y = ts.fit_transform(X_std)
        return Y, ts.kl_cost_, 0
    raise ValueError(f"unknown DR method {method!r}")


def evaluate_dataset(ds, config):
    """All (dr x classifier x repeat) rows for one loaded dataset."""
    X_std, _, _ = standardize(ds.features)
    d = math.ceil(X_std.shape[1] / 2)
    seeds = [config.seed + r for r in range(config.repeats)]
    rows = []
    for method in config.dr:
        embeddings = {}
        if method == "mds":
            shared = embed(X_std, "mds", d, config, config.seed)
            embeddings = {s: shared for s in seeds}
        else:
            for s in seeds:
                embeddings[s] = embed(X_std, "tsne", d, config, s)
        for s in seeds:
            Y, final_cost, n_clamped = embeddings[s]
            split = stratified_split(ds, config.test_fraction, rng=RandomStream(s))
            X_tr, y_tr = Y[split.train], ds.labels[split.train]
            X_te, y_te = Y[split.test], ds.labels[split.test]
            for clf_name in config.classifiers:
                t0 = time.perf_counter()
                clf = make_classifier(clf_name, config)
                clf.fit(X_tr, y_tr)
                y_pred = clf.predict(X_te)
                runtime = time.perf_counter() - t0
                acc, f1, gm = score_row(y_te, y_pred, ds.n_classes)
                rows.append(
                    EvalRow(
                        dataset=ds.name,
                        dr_method=method,
                        classifier=clf_name,
                        seed=s,
                        accuracy=acc,
                        f_measure=f1,
                        g_mean=gm,
                        runtime=runtime,
                        final_cost=final_cost,
                        n_clamped=n_clamped,
                        dropped_rows=ds.dropped_row_count,
                    )
                )
    return rows


def run_pipeline(config: RunConfig):
    """Run the full matrix for every selected manifest dataset."""
    entries = read_manifest(config.manifest)
    if config.datasets:
        by_name = {e.name: e for e in entries}
        missing = [n for n in config.datasets if n not in by_name]
        if missing:
            raise DatasetError(f"dataset(s) not in manifest: {missing}")
        entries = [by_name[n] for n in config.datasets]

    report = EvalReport()
    for entry in entries:
        try:
            ds = load_dataset(entry)
        except DatasetError as exc:
            report.skipped.append((entry.name, str(exc)))
            continue
        report.rows.extend(evaluate_dataset(ds, config))
    report.rows.sort(key=lambda r: (r.dataset, r.dr_method, r.classifier, r.seed))
    return report


CSV_COLUMNS = (
    "dataset,dr_method,classifier,seed,accuracy,f_measure,g_mean,"
    "final_cost,n_clamped,dropped_rows"
)


def _fmt(x):
    return f"{x:.4f}"


def emit_report(report, out_dir, fmt="all"):
    """Write report files; returns the list of paths written.

    csv      -> report.csv (per-seed rows then mean/std aggregate rows)
    markdown -> tables.md (F-measure/G-mean tables per DR method + accuracy)
    both formats also write accuracy_<method>.dat plot data, and
    timings.csv (wall-clock per row; excluded from determinism claims).
    """
    if not report.rows:
        raise ValueError("report is empty")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    if fmt in ("csv", "all"):
        lines = [CSV_COLUMNS]
        for r in report.rows:
            lines.append(
                f"{r.dataset},{r.dr_method},{r.classifier},{r.seed},"
                f"{_fmt(r.accuracy)},{_fmt(r.f_measure)},{_fmt(r.g_mean)},"
                f"{_fmt(r.final_cost)},{r.n_clamped},{r.dropped_rows}"
            )
        path = out / "report.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

        # per-combination mean/std rows live in their own file so
        # report.csv stays exactly one line per record
        lines = ["dataset,dr_method,classifier,stat,accuracy,f_measure,g_mean"]
        for ds, dr, clf, stat, acc, f1, gm in report.aggregates():
            lines.append(
                f"{ds},{dr},{clf},{stat},{_fmt(acc)},{_fmt(f1)},{_fmt(gm)}"
            )
        path = out / "summary.csv"
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    if fmt in ("markdown", "all"):
        written.append(_emit_markdown(report, out))

    for method in sorted({r.dr_method for r in report.rows}):
        path = out / f"accuracy_{method}.dat"
        lines = ["# dataset classifier mean_accuracy"]
        for ds, dr, clf, stat, acc, _, _ in report.aggregates():
            if dr == method and stat == "mean":
                lines.append(f"{ds} {clf} {_fmt(acc)}")
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    path = out / "timings.csv"
    lines = ["dataset,dr_method,classifier,seed,runtime_s"]
    for r in report.rows:
        lines.append(
            f"{r.dataset},{r.dr_method},{r.classifier},{r.seed},{r.runtime:.3f}"
        )
    path.write_text("\n".join(lines) + "\n")
    written.append(path)
    return written


def _emit_markdown(report, out):
    datasets = sorted({r.dataset for r in report.rows})
    methods = sorted({r.dr_method for r in report.rows})
    classifiers = [
        c for c in ("knn", "enn", "svm")
        if any(r.classifier == c for r in report.rows)
    ]
    means = {
        (ds, dr, clf): (acc, f1, gm)
        for ds, dr, clf, stat, acc, f1, gm in report.aggregates()
        if stat == "mean"
    }

    lines = ["# Benchmark report", "", PROTOCOL_NOTE, ""]
    if report.skipped:
        lines.append("Skipped datasets:")
        for name, msg in report.skipped:
            lines.append(f"- {name}: {msg}")
        lines.append("")

    for method in methods:
        lines.append(f"## Performance evaluation with {method.upper()}")
        lines.append("")
        header = ["Dataset"]
        header += [f"F-measure {c.upper()}" for c in classifiers]
        header += [f"G-mean {c.upper()}" for c in classifiers]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for ds in datasets:
            cells = [ds]
            for idx in (1, 2):
                for c in classifiers:
                    key = (ds, method, c)
                    cells.append(_fmt(means[key][idx]) if key in means else "n/a")
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")

    lines.append("## Mean accuracy")
    lines.append("")
    header = ["Dataset"] + [
        f"{m.upper()} {c.upper()}" for m in methods for c in classifiers
    ]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for ds in datasets:
        cells = [ds]
        for m in methods:
            for c in classifiers:
                key = (ds, m, c)
                cells.append(_fmt(means[key][0]) if key in means else "n/a")
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")

    path = out / "tables.md"
    path.write_text("\n".join(lines))
    return path
