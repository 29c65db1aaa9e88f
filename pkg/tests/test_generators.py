import math

import numpy as np
import pytest
from scipy.stats import chi2

from graphspace import (GeneratorSpec, SamplingError, equal_blocks, gen_ba,
                        gen_er, gen_geometric, gen_nws, gen_sbm, generate,
                        is_connected, sample_in_density_band, tune_to_density,
                        vertex_pairs)
from graphspace.generators import expected_geometric_density, pair_count


# -- Erdos-Renyi -------------------------------------------------------------

def test_er_p_one_and_zero():
    assert gen_er(2, 1.0, 0).m == 1
    assert gen_er(5, 0.0, 0).m == 0


def test_er_edge_count_mean():
    # E|E| = p * C(20,2) = 95; generous 3-sigma band on the single-draw std
    counts = [gen_er(20, 0.5, 123, stream=i).m for i in range(10_000)]
    assert abs(np.mean(counts) - 95.0) <= 1.5


def test_er_determinism():
    a = gen_er(30, 0.4, 7, stream=3)
    b = gen_er(30, 0.4, 7, stream=3)
    c = gen_er(30, 0.4, 7, stream=4)
    assert a == b
    assert a != c


def test_er_uniform_over_labeled_graphs():
    # ER(4, 1/2) puts equal mass on all 64 labeled graphs: chi-square
    # goodness of fit at significance 0.001 with 64,000 draws
    draws = 64_000
    pairs = vertex_pairs(4)
    index = {(int(u), int(v)): b for b, (u, v) in enumerate(pairs)}
    counts = np.zeros(64)
    for i in range(draws):
        g = gen_er(4, 0.5, 2024, stream=i)
        mask = 0
        for u, v in g.edges:
            mask |= 1 << index[(int(u), int(v))]
        counts[mask] += 1
    expected = draws / 64
    stat = float(np.sum((counts - expected) ** 2 / expected))
    assert stat < chi2.isf(0.001, 63)


# -- stochastic block model ---------------------------------------------------

def test_sbm_single_block_equals_er():
    assignment = equal_blocks(12, 1)
    a = gen_sbm(12, assignment, [[0.5]], 99, stream=5)
    b = gen_er(12, 0.5, 99, stream=5)
    assert a == b


def test_sbm_all_ones_complete():
    g = gen_sbm(8, equal_blocks(8, 2), [[1.0, 1.0], [1.0, 1.0]], 0)
    assert g.m == pair_count(8)


def test_sbm_two_block_density():
    # expected density (2*C(50,2)*0.75 + 2500*0.25) / C(100,2) = 0.49747...
    probs = [[0.75, 0.25], [0.25, 0.75]]
    assignment = equal_blocks(100, 2)
    dens = [gen_sbm(100, assignment, probs, 17, stream=i).m / pair_count(100)
            for i in range(1000)]
    assert abs(np.mean(dens) - 0.497474747) <= 0.01


def test_sbm_validates_dimensions():
    with pytest.raises(ValueError):
        gen_sbm(4, [0, 0, 1], [[0.5, 0.5], [0.5, 0.5]], 0)
    with pytest.raises(ValueError):
        gen_sbm(4, [0, 0, 1, 1], [[0.5, 0.1], [0.2, 0.5]], 0)


# -- Newman-Watts -------------------------------------------------------------

def test_nws_no_shortcuts_is_ring_lattice():
    n, k = 20, 4
    g = gen_nws(n, k, 0.0, 0)
    assert g.m == n * k // 2
    assert 2 * g.m / (n * (n - 1)) == pytest.approx(k / (n - 1))
    assert is_connected(g)


def test_nws_c4():
    g = gen_nws(4, 2, 0.0, 0)
    assert g.edge_set() == {(0, 1), (1, 2), (2, 3), (0, 3)}


def test_nws_shortcuts_only_add():
    base = gen_nws(30, 4, 0.0, 1)
    g = gen_nws(30, 4, 0.8, 1)
    assert base.edge_set() <= g.edge_set()
    assert g.m > base.m


def test_nws_validates():
    with pytest.raises(ValueError):
        gen_nws(10, 3, 0.1, 0)      # odd ring degree
    with pytest.raises(ValueError):
        gen_nws(4, 4, 0.1, 0)       # k >= n


# -- geometric ----------------------------------------------------------------

def test_geometric_full_radius_complete():
    g = gen_geometric(10, math.sqrt(2.0), 0)
    assert g.m == pair_count(10)


def test_geometric_tiny_radius_empty():
    assert gen_geometric(10, 1e-9, 0).m == 0


def test_geometric_density_matches_monte_carlo():
    radius = 0.45
    dens = [gen_geometric(100, radius, 5, stream=i).m / pair_count(100)
            for i in range(1000)]
    rng = np.random.default_rng(0)
    a = rng.random((1_000_000, 2))
    b = rng.random((1_000_000, 2))
    mc = float(np.mean(np.sum((a - b) ** 2, axis=1) <= radius ** 2))
    assert abs(np.mean(dens) - mc) <= 0.01


def test_expected_geometric_density_closed_form():
    # for r <= 1 the pair-distance CDF is pi r^2 - 8 r^3 / 3 + r^4 / 2
    for r in (0.1, 0.3, 0.45, 0.7, 1.0):
        closed = math.pi * r * r - 8 * r ** 3 / 3 + r ** 4 / 2
        assert expected_geometric_density(r) == pytest.approx(closed,
                                                              abs=1e-8)
    assert expected_geometric_density(math.sqrt(2.0)) == 1.0


# -- preferential attachment --------------------------------------------------

def test_ba_edge_counts():
    assert gen_ba(3, 1, 0).m == 2
    assert gen_ba(5, 2, 0).m == 6          # m (n - m)
    assert gen_ba(2, 1, 0).m == 1


def test_ba_connected_and_valid():
    for seed in range(5):
        g = gen_ba(40, 3, seed)
        assert g.m == 3 * 37
        assert is_connected(g)
        assert int(g.degrees.sum()) == 2 * g.m


def test_ba_validates():
    with pytest.raises(ValueError):
        gen_ba(5, 0, 0)
    with pytest.raises(ValueError):
        gen_ba(5, 5, 0)


# -- spec + dispatch ----------------------------------------------------------

def test_spec_roundtrip_and_dispatch():
    spec = GeneratorSpec("nws", 12, {"k": 4, "p_s": 0.3})
    again = GeneratorSpec.from_json(spec.to_json())
    assert again == spec
    assert generate(spec, 3, 1) == gen_nws(12, 4, 0.3, 3, 1)


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("er", 5, {"p": 1.5})
    with pytest.raises(ValueError):
        GeneratorSpec("ba", 5, {"m": 5})
    with pytest.raises(ValueError):
        GeneratorSpec("sbm", 6, {"blocks": 2,
                                 "probs": [[0.5, 0.1], [0.2, 0.5]]})
    with pytest.raises(ValueError):
        GeneratorSpec("bogus", 5, {})


# -- density-band sampling ----------------------------------------------------

def test_tuning_er_and_nws_and_ba():
    er = tune_to_density(GeneratorSpec("er", 100, {"p": 0.9}), 0.495)
    assert er.params["p"] == 0.495
    nws = tune_to_density(GeneratorSpec("nws", 100, {"k": 34, "p_s": 0.0}),
                          0.495)
    assert nws.params["p_s"] == pytest.approx(0.495 * 99 / 34 - 1)
    ba = tune_to_density(GeneratorSpec("ba", 100, {"m": 1}), 0.495)
    m = ba.params["m"]
    assert abs(m * (100 - m) / 4950 - 0.495) <= \
        min(abs(k * (100 - k) / 4950 - 0.495) for k in range(1, 100)) + 1e-12


def test_tuning_sbm_offdiagonal():
    probs = [[0.75, 0.0], [0.0, 0.75]]
    spec = tune_to_density(GeneratorSpec("sbm", 100,
                                         {"blocks": 2, "probs": probs}),
                           0.495)
    got = np.asarray(spec.params["probs"])
    # off-diagonal solved so that the expected density is the band center
    q = got[0, 1]
    expected_density = (2 * math.comb(50, 2) * 0.75 + 2500 * q) / 4950
    assert expected_density == pytest.approx(0.495)
    assert got[0, 0] == 0.75


def test_tuning_geometric_radius():
    spec = tune_to_density(GeneratorSpec("geometric", 100, {"radius": 0.1}),
                           0.495)
    assert expected_geometric_density(spec.params["radius"]) == \
        pytest.approx(0.495, abs=1e-6)


def test_band_sampler_accepts_in_band():
    g = sample_in_density_band(GeneratorSpec("er", 100, {"p": 0.9}),
                               0.47, 0.52, 100, 11)
    density = g.m / pair_count(100)
    assert 0.47 < density < 0.52
    assert is_connected(g)


def test_band_sampler_unreachable_band():
    # BA density m(n-m)/C(n,2) peaks at ~0.505 for n=100
    with pytest.raises(SamplingError) as info:
        sample_in_density_band(GeneratorSpec("ba", 100, {"m": 2}),
                               0.999, 1.0, 25, 0)
    assert info.value.attempts == 25


def test_band_sampler_er_acceptance_rate():
    spec = tune_to_density(GeneratorSpec("er", 100, {"p": 0.5}), 0.495)
    hits = 0
    for i in range(1000):
        g = generate(spec, 21, stream=i)
        density = g.m / pair_count(100)
        if 0.47 < density < 0.52 and is_connected(g):
            hits += 1
    assert hits / 1000 >= 0.5


def test_band_sampler_validates():
    with pytest.raises(ValueError):
        sample_in_density_band(GeneratorSpec("er", 10, {"p": 0.5}),
                               0.6, 0.4, 10, 0)


def test_equal_blocks():
    assert list(equal_blocks(7, 3)) == [0, 0, 0, 1, 1, 2, 2]
    with pytest.raises(ValueError):
        equal_blocks(3, 4)


def test_generator_outputs_are_valid_graphs():
    from graphspace import build_graph
    samples = [
        gen_er(15, 0.4, 1),
        gen_sbm(15, equal_blocks(15, 3), np.full((3, 3), 0.4).tolist(), 1),
        gen_nws(15, 4, 0.5, 1),
        gen_geometric(15, 0.6, 1),
        gen_ba(15, 3, 1),
    ]
    for g in samples:
        rebuilt = build_graph(g.n, [tuple(e) for e in g.edges])
        assert rebuilt == g
        assert int(g.degrees.sum()) == 2 * g.m
