"""Monte Carlo sweeps for the rainbow-spanning-tree threshold and exact
small-n probes for rainbow perfect matchings (k=2) and rainbow Hamilton
cycles (k=3).

Trials are split across workers by trial index; every trial owns the RNG
stream derived from (master seed, trial index), so the statistical columns
of a sweep are identical for any worker count.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import IO, Sequence

from .intersect import check_condition, find_rst
from .matroid import kappa, partition_rank
from .model import Colouring, MultiGraph, Seed, assign_balanced_colouring, generate_kout

__all__ = [
    "TrialRow",
    "TrialTable",
    "ProbeResult",
    "resolve_q",
    "sweep_rst",
    "rpm_exact",
    "rhc_exact",
    "has_rainbow_perfect_matching",
    "has_rainbow_hamilton_cycle",
    "write_table_csv",
    "write_table_json",
    "write_probes_csv",
    "write_probes_json",
]

RPM_MAX_N = 16
RHC_MAX_N = 14
SPOT_CHECK_EVERY = 100  # re-validate one tree outcome in a hundred


@dataclass(frozen=True)
class TrialRow:
    n: int
    k: int
    q: int
    trials: int
    successes: int
    frequency: float
    mean_ms: float


@dataclass
class TrialTable:
    rows: list[TrialRow]


@dataclass(frozen=True)
class ProbeResult:
    kind: str  # "rpm" | "rhc"
    n: int
    q: int
    trials: int
    successes: int
    frequency: float


def resolve_q(q_rule: str | int, n: int, k: int) -> int:
    """Turn a q rule ("n-1", "n-2", "kn", or a fixed integer) into a value."""
    if isinstance(q_rule, int):
        return q_rule
    rule = q_rule.strip().lower()
    if rule == "n-1":
        return n - 1
    if rule == "n-2":
        return n - 2
    if rule == "kn":
        return k * n
    try:
        return int(rule)
    except ValueError:
        raise ValueError(f"unknown q rule {q_rule!r}: expected n-1, n-2, kn, or an integer") from None


def _master_of(seed: Seed | int) -> int:
    return seed.master if isinstance(seed, Seed) else int(seed)


def _rst_trial(n: int, k: int, q: int, master: int, t: int) -> tuple[bool, float]:
    g_rng, c_rng = Seed(master, t).split(2)
    g = generate_kout(n, k, g_rng)
    c = assign_balanced_colouring(g, q, c_rng)
    t0 = time.perf_counter()
    result = find_rst(g, c)
    elapsed = time.perf_counter() - t0
    if result.is_tree:
        if t % SPOT_CHECK_EVERY == 0:
            _validate_tree(g, c, result.tree_edges)
    else:
        cert = result.certificate
        if check_condition(g, c, cert.colours):  # must be violated
            raise AssertionError("certificate does not violate the tree condition")
    return result.is_tree, elapsed


def _validate_tree(g: MultiGraph, c: Colouring, edges: tuple[int, ...]) -> None:
    if len(edges) != g.n - 1:
        raise AssertionError("tree outcome does not have n-1 edges")
    if kappa(g, edges) != 1:
        raise AssertionError("tree outcome does not span the graph")
    if partition_rank(c, edges) != len(edges):
        raise AssertionError("tree outcome repeats a colour")


def _rst_chunk(payload: tuple[int, int, int, int, int, int]) -> tuple[int, float]:
    n, k, q, master, start, stop = payload
    successes = 0
    total = 0.0
    for t in range(start, stop):
        ok, elapsed = _rst_trial(n, k, q, master, t)
        successes += ok
        total += elapsed
    return successes, total


def sweep_rst(
    n_values: Sequence[int],
    k: int,
    q_rule: str | int,
    trials: int,
    seed: Seed | int,
    workers: int = 1,
) -> TrialTable:
    """Frequency of rainbow-spanning-tree existence per n. Every no-tree
    certificate is re-verified; one tree outcome per hundred trials is
    re-validated (edge count, spanning, rainbow)."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    master = _master_of(seed)
    rows = []
    for n in n_values:
        q = resolve_q(q_rule, n, k)
        if workers > 1:
            step = max(1, (trials + workers - 1) // workers)
            chunks = [(n, k, q, master, lo, min(lo + step, trials)) for lo in range(0, trials, step)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(_rst_chunk, chunks))
            successes = sum(p[0] for p in parts)
            total = sum(p[1] for p in parts)
        else:
            successes, total = _rst_chunk((n, k, q, master, 0, trials))
        rows.append(
            TrialRow(
                n=n,
                k=k,
                q=q,
                trials=trials,
                successes=successes,
                frequency=successes / trials,
                mean_ms=total / trials * 1000.0,
            )
        )
    return TrialTable(rows=rows)


# -- exact structure probes ----------------------------------------------------


def _colour_adjacency(g: MultiGraph, c: Colouring) -> list[list[tuple[int, int]]]:
    """Per-vertex list of (neighbour, colour), both directions, deduplicated."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    seen: set[tuple[int, int, int]] = set()
    owners, targets = g.endpoint_arrays()
    colour_of = c.colour_of
    for e in range(g.num_edges):
        u, v, col = int(owners[e]), int(targets[e]), int(colour_of[e])
        if u == v:
            continue
        a, b = (u, v) if u < v else (v, u)
        if (a, b, col) in seen:
            continue
        seen.add((a, b, col))
        adj[u].append((v, col))
        adj[v].append((u, col))
    return adj


def has_rainbow_perfect_matching(g: MultiGraph, c: Colouring) -> bool:
    """Exact existence of a perfect matching with pairwise distinct edge
    colours, by backtracking on the lowest unmatched vertex."""
    n = g.n
    if n % 2:
        return False
    adj = _colour_adjacency(g, c)
    matched = [False] * n
    used: set[int] = set()

    def extend(lo: int, left: int) -> bool:
        if left == 0:
            return True
        u = lo
        while matched[u]:
            u += 1
        matched[u] = True
        for w, col in adj[u]:
            if not matched[w] and col not in used:
                matched[w] = True
                used.add(col)
                if extend(u + 1, left - 2):
                    return True
                matched[w] = False
                used.remove(col)
        matched[u] = False
        return False

    return extend(0, n)


def has_rainbow_hamilton_cycle(g: MultiGraph, c: Colouring) -> bool:
    """Exact existence of a Hamilton cycle whose n edges carry distinct
    colours, by depth-first path extension from vertex 0."""
    n = g.n
    adj = _colour_adjacency(g, c)
    visited = [False] * n
    visited[0] = True
    used: set[int] = set()

    def extend(u: int, remaining: int) -> bool:
        if remaining == 0:
            return any(w == 0 and col not in used for w, col in adj[u])
        for w, col in adj[u]:
            if w != 0 and not visited[w] and col not in used:
                visited[w] = True
                used.add(col)
                if extend(w, remaining - 1):
                    return True
                visited[w] = False
                used.remove(col)
        return False

    return extend(0, n - 1)


def _probe(kind: str, n: int, k: int, q: int, trials: int, master: int, decide) -> ProbeResult:
    successes = 0
    for t in range(trials):
        g_rng, c_rng = Seed(master, t).split(2)
        g = generate_kout(n, k, g_rng)
        c = assign_balanced_colouring(g, q, c_rng)
        successes += decide(g, c)
    return ProbeResult(kind=kind, n=n, q=q, trials=trials, successes=successes, frequency=successes / trials)


def rpm_exact(n: int, q: int, trials: int, seed: Seed | int) -> ProbeResult:
    """Frequency of rainbow perfect matchings in 2-out samples, decided
    exactly per trial. The graph stream depends only on (master, trial), so
    runs at different q share graphs and are directly comparable."""
    if n % 2:
        raise ValueError("perfect matchings need even n")
    if not 4 <= n <= RPM_MAX_N:
        raise ValueError(f"exhaustive matching probe needs 4 <= n <= {RPM_MAX_N}")
    if trials < 1:
        raise ValueError("need trials >= 1")
    return _probe("rpm", n, 2, q, trials, _master_of(seed), has_rainbow_perfect_matching)


def rhc_exact(n: int, q: int, trials: int, seed: Seed | int) -> ProbeResult:
    """Frequency of rainbow Hamilton cycles in 3-out samples, decided exactly
    per trial; graph streams are shared across q as in rpm_exact."""
    if not 4 <= n <= RHC_MAX_N:
        raise ValueError(f"exhaustive Hamilton probe needs 4 <= n <= {RHC_MAX_N}")
    if trials < 1:
        raise ValueError("need trials >= 1")
    return _probe("rhc", n, 3, q, trials, _master_of(seed), has_rainbow_hamilton_cycle)


# -- output files --------------------------------------------------------------

TABLE_COLUMNS = ["n", "k", "q", "trials", "successes", "frequency", "mean_ms"]
PROBE_COLUMNS = ["kind", "n", "q", "trials", "successes", "frequency"]


def write_table_csv(fp: IO[str], table: TrialTable) -> None:
    writer = csv.writer(fp)
    writer.writerow(TABLE_COLUMNS)
    for row in table.rows:
        writer.writerow([row.n, row.k, row.q, row.trials, row.successes, row.frequency, row.mean_ms])


def write_table_json(fp: IO[str], table: TrialTable, config: dict | None = None) -> None:
    payload: dict = {"rows": [asdict(row) for row in table.rows]}
    if config is not None:
        payload["config"] = config
    json.dump(payload, fp, indent=1)
    fp.write("\n")


def write_probes_csv(fp: IO[str], probes: Sequence[ProbeResult]) -> None:
    writer = csv.writer(fp)
    writer.writerow(PROBE_COLUMNS)
    for p in probes:
        writer.writerow([p.kind, p.n, p.q, p.trials, p.successes, p.frequency])


def write_probes_json(fp: IO[str], probes: Sequence[ProbeResult], config: dict | None = None) -> None:
    payload: dict = {"rows": [asdict(p) for p in probes]}
    if config is not None:
        payload["config"] = config
    json.dump(payload, fp, indent=1)
    fp.write("\n")
