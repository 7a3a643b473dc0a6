"""Confusion-matrix scores: accuracy, macro F-measure, G-mean.

Multi-class averaging: F-measure is the unweighted mean over classes of
the one-vs-rest F1 (classes with precision+recall = 0 contribute 0);
G-mean is the geometric mean of per-class recalls and is 0 as soon as
any class is entirely missed. Both reduce to the usual binary
definitions for two classes.
"""

import numpy as np


def confusion(y_true, y_pred, n_classes):
    """n_classes x n_classes count matrix, entry (t, p) = true t predicted p."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred length mismatch")
    if y_true.size and (max(y_true.max(), y_pred.max()) >= n_classes):
        raise ValueError("label out of range")
    cm = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


def accuracy(cm):
    cm = np.asarray(cm)
    total = cm.sum()
    if total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(cm)) / float(total)


def f_measure(cm):
    """Macro-averaged one-vs-rest F1."""
    cm = np.asarray(cm, dtype=float)
    if cm.sum() == 0:
        raise ValueError("empty confusion matrix")
    n = cm.shape[0]
    scores = np.zeros(n)
    for c in range(n):
        tp = cm[c, c]
        fp = cm[:, c].sum() - tp
        fn = cm[c, :].sum() - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        if precision + recall > 0:
            scores[c] = 2.0 * precision * recall / (precision + recall)
    return float(scores.mean())


def g_mean(cm):
    """Geometric mean of per-class recalls."""
    cm = np.asarray(cm, dtype=float)
    if cm.sum() == 0:
        raise ValueError("empty confusion matrix")
    recalls = []
    for c in range(cm.shape[0]):
        support = cm[c, :].sum()
        recalls.append(cm[c, c] / support if support > 0 else 0.0)
    recalls = np.array(recalls)
    if np.any(recalls == 0.0):
        return 0.0
    return float(np.exp(np.mean(np.log(recalls))))


def score_row(y_true, y_pred, n_classes):
    """(accuracy, f_measure, g_mean) for one prediction set."""
    cm = confusion(y_true, y_pred, n_classes)
    return accuracy(cm), f_measure(cm), g_mean(cm)
