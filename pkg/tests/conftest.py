import numpy as np

from symptomlab.corpus import DesignMatrix, SymptomVocabulary


def make_vocab(d):
    names = tuple(f"s{i:03d}" for i in range(d))
    return SymptomVocabulary(
        entries=names,
        index={n: i for i, n in enumerate(names)},
        severity={n: 1 for n in names},
    )


def make_matrix(features, labels, class_names=None):
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if class_names is None:
        class_names = tuple(f"class_{c}" for c in range(int(labels.max()) + 1))
    return DesignMatrix(
        features=features,
        labels=labels,
        vocabulary=make_vocab(features.shape[1]),
        encoding="binary",
        class_names=tuple(class_names),
    )
