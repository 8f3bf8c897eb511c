import io

import numpy as np
import pytest

from rainbow_kout.experiments import (
    ProbeResult,
    has_rainbow_hamilton_cycle,
    has_rainbow_perfect_matching,
    resolve_q,
    rhc_exact,
    rpm_exact,
    sweep_rst,
    write_probes_csv,
    write_table_csv,
    write_table_json,
)
from rainbow_kout.intersect import find_rst
from rainbow_kout.lemma_lab import is_connected
from rainbow_kout.model import Colouring, MultiGraph, Seed, assign_balanced_colouring, generate_kout


def test_resolve_q():
    assert resolve_q("n-1", 10, 2) == 9
    assert resolve_q("n-2", 10, 2) == 8
    assert resolve_q("kn", 10, 3) == 30
    assert resolve_q("7", 10, 2) == 7
    assert resolve_q(5, 10, 2) == 5
    with pytest.raises(ValueError):
        resolve_q("bogus", 10, 2)


def test_sweep_too_few_colours_is_never_a_tree():
    table = sweep_rst([12, 20], 2, "n-2", 40, 1)
    assert [row.frequency for row in table.rows] == [0.0, 0.0]
    assert all(row.q == row.n - 2 for row in table.rows)


def test_sweep_all_rainbow_matches_connectivity_per_instance():
    # q = kn: colours never bind, so tree existence is exactly connectivity
    for t in range(30):
        g_rng, _ = Seed(3, t).split(2)
        g = generate_kout(12, 2, g_rng)
        c = assign_balanced_colouring(g, g.num_edges, Seed(3, t).split(2)[1])
        assert find_rst(g, c).is_tree == is_connected(g)


def test_sweep_reproducibility_and_worker_independence():
    base = sweep_rst([25], 2, "n-1", 30, 42)
    again = sweep_rst([25], 2, "n-1", 30, 42)
    with_pool = sweep_rst([25], 2, "n-1", 30, 42, workers=2)
    strip = lambda rows: [(r.n, r.k, r.q, r.trials, r.successes, r.frequency) for r in rows]
    assert strip(base.rows) == strip(again.rows) == strip(with_pool.rows)


def test_sweep_rejects_zero_trials():
    with pytest.raises(ValueError):
        sweep_rst([10], 2, "n-1", 0, 1)


def test_rainbow_pm_decision_hand_cases():
    g = MultiGraph(n=4, k=1, targets=np.array([[1], [0], [3], [2]]))
    ok = Colouring(q=2, colour_of=np.array([0, 0, 1, 1]), special_edge_of={})
    assert has_rainbow_perfect_matching(g, ok)
    clash = Colouring(q=1, colour_of=np.array([0, 0, 0, 0]), special_edge_of={})
    assert not has_rainbow_perfect_matching(g, clash)  # both pairs share the colour


def test_rainbow_hc_decision_hand_cases():
    # directed 4-cycle as 1-out choices
    g = MultiGraph(n=4, k=1, targets=np.array([[1], [2], [3], [0]]))
    rainbow = Colouring(q=4, colour_of=np.arange(4), special_edge_of={})
    assert has_rainbow_hamilton_cycle(g, rainbow)
    repeat = Colouring(q=2, colour_of=np.array([0, 1, 0, 1]), special_edge_of={})
    assert not has_rainbow_hamilton_cycle(g, repeat)


def test_probe_validation():
    with pytest.raises(ValueError):
        rpm_exact(9, 5, 10, 1)  # odd n
    with pytest.raises(ValueError):
        rpm_exact(18, 5, 10, 1)  # beyond the exhaustive bound
    with pytest.raises(ValueError):
        rhc_exact(16, 20, 10, 1)
    with pytest.raises(ValueError):
        rpm_exact(10, 5, 0, 1)


def test_probe_zero_bounds():
    assert rpm_exact(8, 3, 40, 5).frequency == 0.0  # q < n/2
    assert rhc_exact(8, 7, 40, 5).frequency == 0.0  # q < n


def test_probe_all_rainbow_regime():
    # q = kn: every edge has its own colour, so only the structure binds
    assert rpm_exact(10, 20, 200, 6).frequency >= 0.9
    assert rhc_exact(10, 30, 200, 6).frequency >= 0.8


def test_probe_shared_graph_streams():
    # same trial index => same graph regardless of q; only colours differ
    a = rpm_exact(10, 20, 50, 9)
    b = rpm_exact(10, 10, 50, 9)
    assert a.trials == b.trials == 50
    g1 = generate_kout(10, 2, Seed(9, 3).split(2)[0])
    g2 = generate_kout(10, 2, Seed(9, 3).split(2)[0])
    assert np.array_equal(g1.targets, g2.targets)


def test_output_writers():
    table = sweep_rst([10], 2, "n-1", 5, 2)
    buf = io.StringIO()
    write_table_csv(buf, table)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "n,k,q,trials,successes,frequency,mean_ms"
    assert len(lines) == 2

    buf2 = io.StringIO()
    write_table_json(buf2, table, config={"subcommand": "sweep"})
    assert '"rows"' in buf2.getvalue()

    probes = [ProbeResult("rpm", 8, 6, 4, 2, 0.5)]
    buf3 = io.StringIO()
    write_probes_csv(buf3, probes)
    assert buf3.getvalue().splitlines()[0] == "kind,n,q,trials,successes,frequency"
