import itertools

import numpy as np
import pytest

from rainbow_kout.intersect import (
    InternalInconsistencyError,
    brute_force_max_rainbow_forest,
    check_condition,
    extract_certificate,
    find_rst,
    max_rainbow_forest,
    result_dict,
    _run_intersection,
)
from rainbow_kout.matroid import kappa, partition_rank
from rainbow_kout.model import (
    Colouring,
    MultiGraph,
    Seed,
    assign_balanced_colouring,
    generate_kout,
    parse_interchange,
)


def random_instance(rng, n_max=8, q_cap=None):
    n = int(rng.integers(3, n_max + 1))
    k = int(rng.integers(1, min(3, n - 1) + 1))
    hi = n * k if q_cap is None else min(n * k, q_cap)
    q = int(rng.integers(max(1, n - 1), hi + 1))
    g = generate_kout(n, k, rng)
    c = assign_balanced_colouring(g, q, rng)
    return g, c


def test_all_rainbow_connected_gives_spanning_tree():
    rng = np.random.default_rng(3)
    found = 0
    while found < 10:
        g = generate_kout(6, 2, rng)
        if kappa(g, range(g.num_edges)) != 1:
            continue
        c = assign_balanced_colouring(g, g.num_edges, rng)  # q = kn: all distinct
        assert max_rainbow_forest(g, c).size == 5
        found += 1


def test_two_parallel_pairs_cap_at_two():
    g = MultiGraph(n=4, k=1, targets=np.array([[1], [0], [3], [2]]))
    for colour_of in ([0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 2, 3]):
        c = Colouring(q=max(colour_of) + 1, colour_of=np.array(colour_of), special_edge_of={})
        assert max_rainbow_forest(g, c).size == 2
        assert brute_force_max_rainbow_forest(g, c).size == 2


def test_oracle_agreement_and_certificates():
    rng = np.random.default_rng(500)
    no_tree = 0
    for _ in range(150):
        g, c = random_instance(rng)
        fast = max_rainbow_forest(g, c)
        slow = brute_force_max_rainbow_forest(g, c)
        assert fast.size == slow.size
        result = find_rst(g, c)
        assert result.is_tree == (fast.size == g.n - 1)
        if not result.is_tree:
            no_tree += 1
            cert = result.certificate
            assert not check_condition(g, c, cert.colours)
            assert cert.kappa_value >= c.q - len(cert.colours) + 2
            assert cert.deficiency >= 1
    assert no_tree > 0  # the sampler must exercise both branches


def test_solution_is_forest_and_rainbow():
    rng = np.random.default_rng(81)
    for _ in range(60):
        g, c = random_instance(rng)
        sol = max_rainbow_forest(g, c)
        assert kappa(g, sol.edges) == g.n - sol.size  # acyclic
        assert partition_rank(c, sol.edges) == sol.size  # rainbow


def test_find_rst_too_few_colours():
    g = generate_kout(8, 2, Seed(17))
    c = assign_balanced_colouring(g, 6, Seed(17, 1))  # q = n-2
    result = find_rst(g, c)
    assert result.status == "no_tree"
    # with q <= n-2 the empty colour set is itself a violation
    assert not check_condition(g, c, [])


def test_check_condition_small_sets():
    g = generate_kout(8, 2, Seed(18))
    c = assign_balanced_colouring(g, 7, Seed(18, 1))  # q = n-1, all colours used
    assert check_condition(g, c, [])
    for col in range(c.q):
        assert check_condition(g, c, [col])


def test_condition_biconditional_exhaustive():
    rng = np.random.default_rng(91)
    for _ in range(25):
        g, c = random_instance(rng, n_max=7, q_cap=10)
        all_hold = all(
            check_condition(g, c, colours)
            for r in range(c.q + 1)
            for colours in itertools.combinations(range(c.q), r)
        )
        assert all_hold == find_rst(g, c).is_tree


def test_find_rst_deterministic():
    g = generate_kout(30, 2, Seed(19))
    c = assign_balanced_colouring(g, 29, Seed(19, 1))
    first = find_rst(g, c)
    second = find_rst(g, c)
    assert first == second


def test_tree_output_shape():
    rng = np.random.default_rng(55)
    seen = 0
    while seen < 10:
        g, c = random_instance(rng)
        result = find_rst(g, c)
        if not result.is_tree:
            continue
        seen += 1
        assert len(result.tree_edges) == g.n - 1
        assert kappa(g, result.tree_edges) == 1
        assert partition_rank(c, result.tree_edges) == g.n - 1


def test_extract_certificate_requires_failure():
    g = generate_kout(5, 2, Seed(20))
    c = assign_balanced_colouring(g, g.num_edges, Seed(20, 1))
    outcome = _run_intersection(g, c)
    if outcome.size == g.n - 1:
        with pytest.raises(ValueError):
            extract_certificate(g, c, outcome)


def test_brute_force_trivial_cases():
    g = generate_kout(2, 1, Seed(21))
    c = assign_balanced_colouring(g, 1, Seed(21, 1))
    assert brute_force_max_rainbow_forest(g, c).size == 1
    big = generate_kout(13, 2, Seed(22))
    with pytest.raises(ValueError):
        brute_force_max_rainbow_forest(big, assign_balanced_colouring(big, 5, Seed(22, 1)))


def test_solver_handles_hand_written_loops():
    edges = [
        {"id": 0, "owner": 0, "target": 0, "colour": 0, "special": False},  # loop
        {"id": 1, "owner": 1, "target": 0, "colour": 1, "special": False},
        {"id": 2, "owner": 2, "target": 1, "colour": 2, "special": False},
    ]
    g, c = parse_interchange({"n": 3, "k": 1, "q": 3, "edges": edges})
    result = find_rst(g, c)
    assert result.status == "tree"
    assert set(result.tree_edges) == {1, 2}

    # all loops: nothing usable, certificate must still verify
    loops = [
        {"id": 0, "owner": 0, "target": 0, "colour": 0, "special": False},
        {"id": 1, "owner": 1, "target": 1, "colour": 1, "special": False},
    ]
    g2, c2 = parse_interchange({"n": 2, "k": 1, "q": 2, "edges": loops})
    result2 = find_rst(g2, c2)
    assert result2.status == "no_tree"
    assert not check_condition(g2, c2, result2.certificate.colours)


def test_result_dict_shapes():
    g = generate_kout(6, 2, Seed(23))
    tree = find_rst(g, assign_balanced_colouring(g, 12, Seed(23, 1)))
    payload = result_dict(tree)
    assert payload["status"] in ("tree", "no_tree")
    if tree.is_tree:
        assert payload["certificate"] is None
        assert len(payload["tree_edges"]) == 5
    g2 = generate_kout(6, 2, Seed(24))
    none = find_rst(g2, assign_balanced_colouring(g2, 4, Seed(24, 1)))
    payload2 = result_dict(none)
    assert payload2["status"] == "no_tree"
    assert payload2["tree_edges"] is None
    assert isinstance(payload2["certificate"]["kappa"], int)
