"""Dimensionality reduction (t-SNE, classical MDS) and classification
(KNN, ENN, linear SVM) from scratch, with a deterministic benchmark
harness over UCI-style delimited datasets."""

from .mds import ClassicalMDS
from .neighbors import ENNClassifier, KNNClassifier
from .svm import LinearSVM
from .tsne import TSNE

__all__ = ["TSNE", "ClassicalMDS", "KNNClassifier", "ENNClassifier", "LinearSVM"]

__version__ = "0.1.0"
