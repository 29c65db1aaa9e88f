"""Acceptance suite: one test per criterion, each printing a PASS/FAIL
line with measured values. Shared datasets are built once per session.

Run with `pytest tests/test_acceptance.py -v -s`. The whole module takes
roughly 30-45 minutes on two cores.
"""

import itertools
import math
import os

import numpy as np
import pytest

import graphspace as gs
from graphspace.analytics import train_predictors
from graphspace.experiments import (DENSITY_BAND, build_class_dataset,
                                    build_er_dataset, default_class_specs,
                                    er_spec)
from graphspace.properties import PROPERTY_NAMES

import oracles

SEED = 20240
WORKERS = min(2, os.cpu_count() or 1)

NAMES = list(PROPERTY_NAMES)


def report(num: int, ok: bool, detail: str) -> bool:
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


# ---------------------------------------------------------------------------
# shared datasets
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def er1000():
    ds, graphs = build_er_dataset(100, 0.5, 1000, seed=SEED, workers=WORKERS,
                                  keep_graphs=True)
    return ds, graphs


@pytest.fixture(scope="module")
def pred5000():
    ds, _ = build_er_dataset(100, 0.5, 5000, seed=SEED, workers=WORKERS)
    return ds


@pytest.fixture(scope="module")
def class8000():
    specs = default_class_specs(100, DENSITY_BAND, seed=SEED, count=1000)
    return build_class_dataset(specs, DENSITY_BAND, seed=SEED,
                               workers=WORKERS)


# ---------------------------------------------------------------------------
# 1. exact enumeration
# ---------------------------------------------------------------------------

def test_criterion_01_exact_enumeration():
    expected = {4: 38, 5: 728, 6: 26_704, 7: 1_866_256}
    counts = {n: gs.connected_count(n) for n in (4, 5, 6, 7)}
    counts_ok = counts == expected

    # the published connectivity table, whose columns are shifted by one
    # relative to the exact vertex counts
    published = {5: 0.598, 6: 0.713, 7: 0.816, 8: 0.891}
    probs = {n: gs.connected_probability(n) for n in (4, 5, 6, 7)}
    shift_ok = all(abs(probs[n] - published[n + 1]) <= 0.005
                   for n in (4, 5, 6, 7))
    ok = counts_ok and shift_ok
    report(1, ok, f"connected counts {counts}; exact probabilities "
                  f"{ {n: round(p, 4) for n, p in probs.items()} } match the "
                  f"published table under a one-column shift")
    assert ok


# ---------------------------------------------------------------------------
# 2. property oracle suite, every connected labeled graph with n <= 6
# ---------------------------------------------------------------------------

def test_criterion_02_property_oracles():
    worst = 0.0
    checked = 0
    for n in (4, 5, 6):
        for g in gs.enumerate_labeled(n, filter_connected=True):
            mine = gs.compute_property_vector(g).as_array()
            ref = oracles.property_vector_oracle(g)
            worst = max(worst, float(np.abs(mine - ref).max()))
            checked += 1
    ok = worst <= 1e-8 and checked == 38 + 728 + 26_704
    report(2, ok, f"{checked} graphs checked against brute-force oracles, "
                  f"max deviation {worst:.2e} (tolerance 1e-08)")
    assert ok


# ---------------------------------------------------------------------------
# 3. ER(100, 1/2) sample means against the known bounds
# ---------------------------------------------------------------------------

def test_criterion_03_er_means(er1000):
    ds, _ = er1000
    X = ds.features
    gcc_mean = X[:, NAMES.index("gcc")].mean()
    den_mean = X[:, NAMES.index("den")].mean()
    r_mean = X[:, NAMES.index("r")].mean()
    diam_raw = X[:, NAMES.index("diam")] * 99
    diam2_frac = float(np.mean(np.isclose(diam_raw, 2.0)))
    rho_raw_mean = (X[:, NAMES.index("rho")] * 99).mean()

    clauses = {
        "gcc": 0.49 <= gcc_mean <= 0.51,
        "den": 0.495 <= den_mean <= 0.505,
        "r": -0.02 <= r_mean <= 0.02,
        "diam": diam2_frac >= 0.99,
        "rho": abs(rho_raw_mean - 50.0) <= 0.05 * 50.0,
    }
    ok = all(clauses.values())
    report(3, ok, f"mean gcc={gcc_mean:.4f}, den={den_mean:.4f}, "
                  f"r={r_mean:.5f}, diam=2 fraction={diam2_frac:.3f}, raw "
                  f"spectral radius={rho_raw_mean:.2f} (np=50); clauses "
                  f"{clauses}")
    assert ok


# ---------------------------------------------------------------------------
# 4. correlation structure
# ---------------------------------------------------------------------------

def test_criterion_04_correlation_structure(er1000):
    ds, _ = er1000
    corr = gs.correlation_matrix(ds)
    group1 = [NAMES.index(p) for p in ("gcc", "apl", "den", "rg", "rho")]
    group2 = [NAMES.index(p) for p in ("cc", "cb", "cei")]
    r_idx = NAMES.index("r")
    min_g1 = min(abs(corr[i, j])
                 for i, j in itertools.combinations(group1, 2))
    min_g2 = min(abs(corr[i, j])
                 for i, j in itertools.combinations(group2, 2))
    max_r = max(abs(corr[r_idx, j]) for j in range(12)
                if j != r_idx and not np.isnan(corr[r_idx, j]))
    groups_ok = min_g1 > max_r and min_g2 > max_r

    # sampled n=5 matrix vs exact enumeration, entrywise within 0.05
    feats, _ = gs.sampling.sample_connected_vectors(
        er_spec(5, 0.5), 10_000, SEED, base_stream=7 << 32, workers=WORKERS)
    sampled = gs.correlation_matrix(feats)
    exact = gs.exact_correlation_matrix(5)
    both = ~(np.isnan(sampled) | np.isnan(exact))
    entry_gap = float(np.abs(sampled[both] - exact[both]).max())
    nan_agree = bool(np.array_equal(np.isnan(sampled), np.isnan(exact)))
    sample_ok = entry_gap <= 0.05 and nan_agree

    ok = groups_ok and sample_ok
    report(4, ok, f"within-group min |corr| {min_g1:.3f}/{min_g2:.3f} vs "
                  f"max |corr(r,.)| {max_r:.3f}; sampled-vs-exact n=5 max "
                  f"entry gap {entry_gap:.4f} (tolerance 0.05)")
    assert ok


def test_paper_example_correlation_pairs(er1000):
    # den and rho move together; assortativity stays decoupled from density
    ds, _ = er1000
    corr = gs.correlation_matrix(ds)
    den_rho = abs(corr[NAMES.index("den"), NAMES.index("rho")])
    r_den = abs(corr[NAMES.index("r"), NAMES.index("den")])
    assert den_rho > 0.9
    assert r_den < 0.3


# ---------------------------------------------------------------------------
# 5. prediction losses
# ---------------------------------------------------------------------------

def test_criterion_05_prediction(pred5000):
    ds = pred5000
    split_seeds = [SEED + k for k in range(5)]
    losses = {target: {mode: [] for mode in ("mean", "linear", "nonlinear")}
              for target in NAMES}
    for target in NAMES:
        for mode in ("mean", "linear", "nonlinear"):
            for s in split_seeds:
                losses[target][mode].append(
                    train_predictors(ds, target, mode, split_seed=s)
                    .test_loss)

    def mean(target, mode):
        return float(np.mean(losses[target][mode]))

    tenfold_ok = all(mean(t, "linear") <= mean(t, "mean") / 10.0
                     for t in ("rho", "rg", "den"))
    diam_ok = all(l == 0.0 for l in losses["diam"]["mean"])
    noise_ok = all(
        mean(t, "nonlinear") <= mean(t, "linear") +
        float(np.std(losses[t]["linear"])) for t in NAMES)
    improvements = {t: 1.0 - mean(t, "nonlinear") / mean(t, "linear")
                    for t in ("r", "cc")}
    improve_ok = all(v >= 0.25 for v in improvements.values())

    ok = tenfold_ok and diam_ok and noise_ok and improve_ok
    report(5, ok,
           f"linear/mean ratios: "
           f"{ {t: round(mean(t, 'linear') / mean(t, 'mean'), 4) for t in ('rho', 'rg', 'den')} } "
           f"(need <= 0.1); diam mean-loss zero: {diam_ok}; "
           f"nonlinear within split noise of linear for all targets: "
           f"{noise_ok}; nonlinear improvement over linear "
           f"{ {t: round(v, 3) for t, v in improvements.items()} } "
           f"(need >= 0.25)")
    assert ok


# ---------------------------------------------------------------------------
# 6. feature selection
# ---------------------------------------------------------------------------

def test_criterion_06_importance(pred5000):
    imp = gs.importance_matrix(pred5000, threshold=0.20, split_seed=SEED)
    corr = np.abs(gs.correlation_matrix(pred5000))

    gcc_row = imp.counts[NAMES.index("gcc")]
    order = np.argsort(-gcc_row)
    den_rank = int(np.where(order == NAMES.index("den"))[0][0]) + 1
    den_ok = den_rank <= 3

    agree = 0
    for t in range(12):
        top_imp = int(np.argmax(imp.counts[t]))
        row = corr[t].copy()
        row[t] = -np.inf
        row[np.isnan(row)] = -np.inf
        corr_rank = int(np.where(np.argsort(-row) == top_imp)[0][0]) + 1
        agree += corr_rank <= 4
    agree_ok = agree >= 9

    ok = den_ok and agree_ok
    top3 = [NAMES[c] for c in order[:3]]
    report(6, ok, f"gcc importance row top-3 {top3}, den rank {den_rank} "
                  f"(need <= 3); importance/|corr| rank agreement "
                  f"{agree}/12 (need >= 9)")
    assert ok


# ---------------------------------------------------------------------------
# 7. generator classification
# ---------------------------------------------------------------------------

def test_criterion_07_classification(class8000):
    ds = class8000
    assert len(ds) == 8000 and len(set(ds.labels)) == 8
    den = ds.column("den")
    assert np.all((den > DENSITY_BAND[0]) & (den < DENSITY_BAND[1]))

    rf_all = gs.repeated_holdout_accuracy(ds, "random_forest", repeats=10,
                                          seed=SEED)
    lr_all = gs.repeated_holdout_accuracy(ds, "logistic", repeats=10,
                                          seed=SEED)
    pair = gs.repeated_holdout_accuracy(ds, "random_forest",
                                        feature_subset=("gcc", "rho"),
                                        repeats=10, seed=SEED)
    triples = [("gcc", "ascc", "rho"), ("gcc", "ascc", "apl"),
               ("gcc", "ascc", "den")]
    triple_accs = {t: gs.repeated_holdout_accuracy(
        ds, "random_forest", feature_subset=t, repeats=10,
        seed=SEED).mean_accuracy for t in triples}
    best_triple = max(triple_accs.values())

    clauses = {
        "forest_all12": rf_all.mean_accuracy >= 0.85,
        "pair_gcc_rho": pair.mean_accuracy >= 0.80,
        "best_triple": best_triple >= 0.87,
        "forest_vs_logistic":
            rf_all.mean_accuracy >= lr_all.mean_accuracy + 0.05,
    }
    ok = all(clauses.values())
    report(7, ok, f"forest all-12 {rf_all.mean_accuracy:.3f} (>=0.85), "
                  f"logistic {lr_all.mean_accuracy:.3f}, pair(gcc,rho) "
                  f"{pair.mean_accuracy:.3f} (>=0.80), best triple "
                  f"{best_triple:.3f} (>=0.87); clauses {clauses}")
    assert ok


def test_paper_example_sweep_top_pairs(class8000):
    # restricted sweep (all pairs containing gcc plus 20 seeded random
    # others, as the runtime budget allows): gcc should dominate the top
    all_pairs = list(itertools.combinations(PROPERTY_NAMES, 2))
    gcc_pairs = [p for p in all_pairs if "gcc" in p]
    rest = [p for p in all_pairs if "gcc" not in p]
    rng = gs.graph_rng(SEED, 0x5FEE9)
    picks = sorted(rng.permutation(len(rest))[:20].tolist())
    subsets = gcc_pairs + [rest[i] for i in picks]
    result = gs.subset_sweep(class8000, model_kinds=("random_forest",),
                             subset_size=2, repeats=10, seed=SEED,
                             subsets=subsets)
    top10 = result.rows[:10]
    gcc_in_top = sum(1 for row in top10 if "gcc" in row.features)
    print(f"\n[paper example] sweep top-10 pairs: "
          f"{[('+'.join(r.features), round(r.accuracies['random_forest'], 3)) for r in top10]}")
    assert gcc_in_top >= 8


# ---------------------------------------------------------------------------
# 8. collisions
# ---------------------------------------------------------------------------

def test_criterion_08_collisions(er1000):
    ds, graphs = er1000
    rep = gs.find_collisions(ds, 2, graphs=graphs)
    verdicts = {v.verdict for v in rep.pair_verdicts}
    verified = not ({"identical", "unverified"} & verdicts)
    count_ok = 20 <= rep.pair_count <= 200
    ok = rep.pair_count >= 1 and count_ok and verified
    report(8, ok, f"{rep.pair_count} colliding pairs "
                  f"({rep.triple_count} triples, {rep.quadruple_count} "
                  f"quadruples) among 1000 graphs at 2 decimals; verdicts "
                  f"{sorted(verdicts)}; all pairs non-identical: {verified}")
    assert ok


def test_paper_example_collision_hunt_trend():
    # fewer graphs are needed to hit a collision as n grows (two sizes,
    # ten runs each)
    spec50 = er_spec(50, 0.5)
    spec100 = er_spec(100, 0.5)
    runs50 = [gs.collision_search_until_pair(spec50, 2, SEED,
                                             base_stream=(r << 32))
              for r in range(10)]
    runs100 = [gs.collision_search_until_pair(spec100, 2, SEED,
                                              base_stream=(r << 32))
               for r in range(10)]
    med50 = float(np.median(runs50))
    med100 = float(np.median(runs100))
    print(f"\n[paper example] collision hunt medians: n=50 -> {med50}, "
          f"n=100 -> {med100}")
    assert math.isfinite(med100)
    assert med100 < med50


# ---------------------------------------------------------------------------
# 9. stability of sampled correlations
# ---------------------------------------------------------------------------

def test_criterion_09_stability():
    sizes = [100, 200, 400, 800, 1600]
    result = gs.stability_test(er_spec(100, 0.5), sizes, repeats=10,
                               seed=SEED, workers=WORKERS)
    first = result.spread_std(sizes[0])
    last = result.spread_std(sizes[-1])
    good = 0
    total = 0
    for i in range(12):
        for j in range(i + 1, 12):
            total += 1
            if (not np.isnan(first[i, j]) and not np.isnan(last[i, j])
                    and last[i, j] <= first[i, j]):
                good += 1
    ok = good >= 0.9 * total
    report(9, ok, f"correlation spread (std over 10 repeats) non-increasing "
                  f"from size 100 to 1600 for {good}/{total} property pairs "
                  f"(need >= {math.ceil(0.9 * total)})")
    assert ok


# ---------------------------------------------------------------------------
# 10. byte-identical reruns
# ---------------------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    from graphspace.cli import main
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main(["run", "connectivity", "--n", "8..10", "--samples",
                     "400", "--seed", str(SEED), "--out", str(out)])
        assert code == 0
        outs.append((out / "connectivity.csv").read_bytes())
    byte_identical = outs[0] == outs[1]

    builds = []
    for name in ("c", "d"):
        out = tmp_path / name
        code = main(["dataset-build", "--n", "20", "--count", "2", "--band",
                     "0.35,0.65", "--seed", str(SEED), "--out", str(out),
                     "--threads", str(WORKERS)])
        assert code == 0
        builds.append((out / "dataset.csv").read_bytes())
    build_identical = builds[0] == builds[1]

    ok = byte_identical and build_identical
    report(10, ok, f"experiment rerun byte-identical: {byte_identical}; "
                   f"dataset build rerun byte-identical: {build_identical}")
    assert ok


def test_paper_example_connectivity_at_13(tmp_path):
    from graphspace.cli import main
    out = tmp_path / "conn"
    code = main(["run", "connectivity", "--n", "13", "--samples", "1000",
                 "--p", "0.5", "--seed", str(SEED), "--out", str(out)])
    assert code == 0
    body = [l for l in (out / "connectivity.csv").read_text().splitlines()
            if not l.startswith("#")]
    frac = float(body[1].split(",")[3])
    print(f"\n[paper example] connected fraction at n=13, p=1/2: {frac}")
    assert frac >= 0.985
