from .artifact import FORMAT_VERSION, ModelArtifact, load, resample_to_window, save, windows_matrix
from .cnn import CNNClassifier
from .knn import KNearestNeighbors
from .mlp import MLPClassifier
from .svm import LinearSVM

__all__ = [
    "CNNClassifier",
    "FORMAT_VERSION",
    "KNearestNeighbors",
    "LinearSVM",
    "MLPClassifier",
    "ModelArtifact",
    "load",
    "resample_to_window",
    "save",
    "windows_matrix",
]
