import numpy as np
import pytest

from graphspace import (Dataset, fit_logistic, fit_random_forest,
                        repeated_holdout_accuracy, subset_sweep)
from graphspace.classifiers import stratified_split
from graphspace.rng import graph_rng


def two_class_dataset(rows=400, seed=0, gap=1.0):
    """Feature 0 separates the classes by a threshold; the rest is noise."""
    rng = np.random.default_rng(seed)
    features = rng.random((rows, 12))
    labels = []
    for i in range(rows):
        if i % 2 == 0:
            features[i, 0] = rng.uniform(0.0, 0.45)
            labels.append("low")
        else:
            features[i, 0] = rng.uniform(0.45 + 0.1 * gap, 1.0)
            labels.append("high")
    return Dataset(features=features, labels=labels)


def test_forest_single_class():
    rng = np.random.default_rng(0)
    ds = Dataset(features=rng.random((60, 12)), labels=["only"] * 60)
    model = fit_random_forest(ds, trees=10, seed=1)
    assert model.predict(ds.features) == ["only"] * 60


def test_forest_threshold_separable():
    ds = two_class_dataset()
    train = Dataset(features=ds.features[:300], labels=ds.labels[:300])
    model = fit_random_forest(train, trees=25, seed=3)
    pred = model.predict(ds.features[300:])
    assert pred == ds.labels[300:]


def test_forest_deterministic():
    ds = two_class_dataset(seed=5)
    a = fit_random_forest(ds, trees=15, seed=9)
    b = fit_random_forest(ds, trees=15, seed=9)
    assert np.array_equal(a.feat, b.feat)
    assert np.array_equal(a.thr, b.thr)


def test_forest_monotone_feature_transform_invariance():
    # strictly monotone transforms of one feature leave every split's
    # sample partition unchanged, so re-fit predictions are identical
    ds = two_class_dataset(seed=7)
    model_a = fit_random_forest(ds, trees=12, seed=4)
    transformed = ds.features.copy()
    transformed[:, 0] = np.exp(3.0 * transformed[:, 0])
    ds_b = Dataset(features=transformed, labels=ds.labels)
    model_b = fit_random_forest(ds_b, trees=12, seed=4)
    assert model_a.predict(ds.features) == model_b.predict(transformed)


def test_logistic_separable():
    ds = two_class_dataset(seed=2, gap=3.0)
    model = fit_logistic(ds, iterations=500)
    acc = np.mean(np.array(model.predict(ds.features)) ==
                  np.array(ds.labels))
    assert acc == 1.0


def test_logistic_zero_iterations_uniform():
    ds = two_class_dataset(seed=3)
    model = fit_logistic(ds, iterations=0)
    # all logits equal: everything predicts the first class
    pred = model.predict(ds.features)
    assert set(pred) == {model.classes[0]}
    acc = np.mean(np.array(pred) == np.array(ds.labels))
    assert acc == pytest.approx(0.5, abs=0.02)


def test_logistic_proba_sums_to_one():
    ds = two_class_dataset(seed=4)
    model = fit_logistic(ds, iterations=50)
    p = model.predict_proba(ds.features[:10])
    assert np.allclose(p.sum(axis=1), 1.0)


def test_stratified_split_balanced():
    labels = ["a"] * 50 + ["b"] * 30
    train, test = stratified_split(labels, 0.8, graph_rng(0))
    assert len(train) == 40 + 24
    assert len(test) == 10 + 6
    assert sorted(np.concatenate([train, test]).tolist()) == list(range(80))


def test_repeated_holdout_deterministic_and_single():
    ds = two_class_dataset(seed=6)
    a = repeated_holdout_accuracy(ds, "random_forest", repeats=3, seed=11,
                                  trees=10)
    b = repeated_holdout_accuracy(ds, "random_forest", repeats=3, seed=11,
                                  trees=10)
    assert a.accuracies == b.accuracies
    single = repeated_holdout_accuracy(ds, "random_forest", repeats=1,
                                       seed=11, trees=10)
    assert single.accuracies == [a.accuracies[0]]
    assert single.mean_accuracy == single.accuracies[0]


def test_holdout_validates():
    ds = two_class_dataset()
    with pytest.raises(ValueError):
        repeated_holdout_accuracy(ds, "svm")
    with pytest.raises(ValueError):
        repeated_holdout_accuracy(ds, "random_forest", repeats=0)
    unlabeled = Dataset(features=ds.features)
    with pytest.raises(ValueError):
        repeated_holdout_accuracy(unlabeled, "random_forest")


def test_subset_sweep_ranked():
    ds = two_class_dataset(seed=8)
    subsets = [("gcc", "ascc"), ("apl", "r"), ("gcc", "den")]
    result = subset_sweep(ds, model_kinds=("random_forest",), subset_size=2,
                          repeats=2, seed=1, trees=10, subsets=subsets)
    accs = [row.accuracies["random_forest"] for row in result.rows]
    assert accs == sorted(accs, reverse=True)
    assert {row.features for row in result.rows} == set(subsets)
    # feature 0 is "gcc" in the synthetic data: subsets containing it win
    assert "gcc" in result.rows[0].features


def test_subset_sweep_validates():
    ds = two_class_dataset()
    with pytest.raises(ValueError):
        subset_sweep(ds, subset_size=4)


def test_triples_dominate_pairs_on_toy_data():
    # feature supersets cannot do worse beyond repeat noise
    ds = two_class_dataset(seed=12, gap=0.5)
    pair = repeated_holdout_accuracy(ds, "random_forest",
                                     feature_subset=("gcc", "ascc"),
                                     repeats=5, seed=2, trees=20)
    triple = repeated_holdout_accuracy(ds, "random_forest",
                                       feature_subset=("gcc", "ascc", "apl"),
                                       repeats=5, seed=2, trees=20)
    noise = max(pair.std_accuracy, 1e-3)
    assert triple.mean_accuracy >= pair.mean_accuracy - noise
