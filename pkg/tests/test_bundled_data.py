import numpy as np
import pytest

from treegraft.dataset import bundled_names, load_bundled

# published summary metadata the bundled files must reproduce:
# (objects, input attributes, classes, % most common class)
BUNDLED_METADATA = {
    "breast_cancer_wisconsin": (699, 9, 2, 66),
    "cleveland_heart_disease": (303, 13, 2, 54),
    "credit_rating": (690, 15, 2, 56),
    "glass_type": (214, 9, 3, 40),
    "iris": (150, 4, 3, 33),
    "pima_diabetes": (768, 8, 2, 65),
}

CONTINUOUS_COUNTS = {
    "breast_cancer_wisconsin": 9,
    "cleveland_heart_disease": 6,
    "credit_rating": 6,
    "glass_type": 9,
    "iris": 4,
    "pima_diabetes": 8,
}


def most_common_pct(dataset) -> int:
    counts = np.bincount(dataset.columns().labels)
    return round(100.0 * counts.max() / len(dataset))


def test_expected_bundle_present():
    assert bundled_names() == tuple(sorted(BUNDLED_METADATA))


@pytest.mark.parametrize("name", sorted(BUNDLED_METADATA))
def test_bundled_metadata(name):
    ds = load_bundled(name)
    got = (len(ds), len(ds.schema.inputs), ds.schema.n_classes, most_common_pct(ds))
    assert got == BUNDLED_METADATA[name]


@pytest.mark.parametrize("name", sorted(CONTINUOUS_COUNTS))
def test_bundled_continuous_attribute_counts(name):
    ds = load_bundled(name)
    assert len(ds.schema.continuous_positions) == CONTINUOUS_COUNTS[name]


def test_iris_has_no_missing_values():
    ds = load_bundled("iris")
    assert all(v is not None for ex in ds.examples for v in ex.values)


def test_credit_missing_rate_about_one_percent():
    ds = load_bundled("credit_rating")
    cells = sum(len(ex.values) for ex in ds.examples)
    missing = sum(1 for ex in ds.examples for v in ex.values if v is None)
    assert round(100.0 * missing / cells) == 1
