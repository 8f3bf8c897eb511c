"""Exact formulas and Monte Carlo estimators for the auxiliary probabilistic
facts behind the rainbow-spanning-tree threshold, checked at desk scale:
cycle counts of the 2-regular vertex-colour incidence graph, monochromatic
parallel edge pairs, and plain connectivity of k-out samples.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .matroid import kappa
from .model import (
    BipartiteColourGraph,
    Colouring,
    MultiGraph,
    RngLike,
    as_generator,
    assign_balanced_colouring,
    balanced_profile,
    generate_gamma,
    generate_kout,
)

__all__ = [
    "CycleStats",
    "LemmaReport",
    "count_cycles_2regular_bipartite",
    "expected_cycles_exact",
    "count_monochromatic_parallel_pairs",
    "expected_monochromatic_parallel_pairs",
    "estimate_connectivity",
    "is_connected",
    "gamma_cycle_stats",
    "run_gamma_cycles_lemma",
    "run_mono_parallel_lemma",
    "run_connectivity_lemma",
]


@dataclass
class CycleStats:
    """Per-sample cycle counts with their mean and standard error."""

    samples: int
    counts: list[int]
    mean: float
    stderr: float

    @classmethod
    def from_counts(cls, counts: list[int]) -> "CycleStats":
        samples = len(counts)
        mean = math.fsum(counts) / samples
        if samples > 1:
            var = math.fsum((c - mean) ** 2 for c in counts) / (samples - 1)
            stderr = math.sqrt(var / samples)
        else:
            stderr = float("inf")
        return cls(samples=samples, counts=counts, mean=mean, stderr=stderr)


@dataclass
class LemmaReport:
    """One checked fact: exact value (when a formula exists), empirical value,
    and a z-score verdict. pass requires |z| <= z_threshold; facts without an
    exact finite-n value (z_score None) record their bound check instead."""

    lemma: str
    exact: float | None
    empirical: float
    z_score: float | None
    z_threshold: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "exact": self.exact,
            "empirical": self.empirical,
            "z_score": self.z_score,
            "z_threshold": self.z_threshold,
            "passed": self.passed,
            "details": self.details,
        }


def count_cycles_2regular_bipartite(gamma: BipartiteColourGraph) -> int:
    """Number of cycles of a 2-regular bipartite multigraph (a doubled edge
    is a 2-cycle). Right vertices of degree 0 are permitted (the dummy is
    isolated whenever there are no popular colours) and lie on no cycle;
    any other deviation from degree 2 is rejected.
    """
    if gamma.k != 2:
        raise ValueError("left degrees must all be 2")
    deg = gamma.right_degrees()
    if np.any((deg != 2) & (deg != 0)):
        raise ValueError("right degrees must all be 2")
    kn = gamma.num_edges
    # Pair up the two incidences of each right vertex, then walk: crossing a
    # right vertex and then a left vertex (ids 2v, 2v+1 are mates) advances
    # two steps around a cycle, so each cycle splits into exactly two orbits.
    order = np.argsort(gamma.right, kind="stable")
    mate = np.empty(kn, dtype=np.int64)
    mate[order[0::2]] = order[1::2]
    mate[order[1::2]] = order[0::2]
    step = (mate ^ 1).tolist()
    visited = bytearray(kn)
    orbits = 0
    for start in range(kn):
        if visited[start]:
            continue
        orbits += 1
        e = start
        while not visited[e]:
            visited[e] = 1
            e = step[e]
    assert orbits % 2 == 0
    return orbits // 2


def expected_cycles_exact(n: int) -> float:
    """Exact expected cycle count of a uniform pairing of n doubled points
    per side: sum_{i=1..n} 1/(2n - 2i + 1), which is (1/2) ln n + O(1)."""
    if n < 1:
        raise ValueError("need n >= 1")
    return math.fsum(1.0 / (2 * n - 2 * i + 1) for i in range(1, n + 1))


def count_monochromatic_parallel_pairs(g: MultiGraph, c: Colouring) -> int:
    """Unordered pairs of edges with the same endpoint set and colour."""
    owners, targets = g.endpoint_arrays()
    counter: Counter = Counter()
    colour_of = c.colour_of
    for e in range(g.num_edges):
        u, v = int(owners[e]), int(targets[e])
        if u > v:
            u, v = v, u
        counter[(u, v, int(colour_of[e]))] += 1
    return sum(m * (m - 1) // 2 for m in counter.values())


def expected_monochromatic_parallel_pairs(n: int, k: int, q: int) -> float:
    """Exact first moment: (expected parallel pairs) x (probability two fixed
    slots share a colour). Both factors are closed-form for this model."""
    kn = n * k
    rho, num_popular = balanced_profile(kn, q)
    same_colour = (num_popular * (rho + 1) * rho + (q - num_popular) * rho * (rho - 1)) / (kn * (kn - 1))
    parallel_pairs = (n * (n - 1) / 2) * (k / (n - 1)) ** 2
    return parallel_pairs * same_colour


def is_connected(g: MultiGraph) -> bool:
    return kappa(g, range(g.num_edges)) == 1


def estimate_connectivity(n: int, k: int, trials: int, seed: RngLike = None) -> float:
    """Fraction of k-out samples that are connected (plain connectivity)."""
    if trials < 1:
        raise ValueError("need trials >= 1")
    rng = as_generator(seed)
    hits = sum(is_connected(generate_kout(n, k, rng)) for _ in range(trials))
    return hits / trials


def gamma_cycle_stats(n: int, samples: int, seed: RngLike = None) -> CycleStats:
    """Cycle counts of incidence graphs at k = 2 with matched sides
    (q + 1 = n), the regime where expected_cycles_exact applies. Needs
    n >= 4 so that the profile is 2-regular."""
    if samples < 1:
        raise ValueError("need samples >= 1")
    if n < 4:
        raise ValueError("matched 2-regular profile needs n >= 4")
    rng = as_generator(seed)
    counts = [count_cycles_2regular_bipartite(generate_gamma(n, 2, n - 1, rng)) for _ in range(samples)]
    return CycleStats.from_counts(counts)


def run_gamma_cycles_lemma(n: int, samples: int, seed: RngLike = None, z_threshold: float = 3.0) -> LemmaReport:
    stats = gamma_cycle_stats(n, samples, seed)
    exact = expected_cycles_exact(n)
    z = (stats.mean - exact) / stats.stderr if stats.stderr > 0 else float("inf")
    return LemmaReport(
        lemma="gamma-cycles",
        exact=exact,
        empirical=stats.mean,
        z_score=z,
        z_threshold=z_threshold,
        passed=abs(z) <= z_threshold,
        details={"n": n, "samples": samples, "stderr": stats.stderr},
    )


def run_mono_parallel_lemma(
    n: int, k: int, q: int, trials: int, seed: RngLike = None, z_threshold: float = 3.0
) -> LemmaReport:
    if trials < 2:
        raise ValueError("need trials >= 2")
    rng = as_generator(seed)
    counts = []
    for _ in range(trials):
        g = generate_kout(n, k, rng)
        c = assign_balanced_colouring(g, q, rng)
        counts.append(count_monochromatic_parallel_pairs(g, c))
    stats = CycleStats.from_counts(counts)
    exact = expected_monochromatic_parallel_pairs(n, k, q)
    if stats.stderr > 0:
        z = (stats.mean - exact) / stats.stderr
    else:
        z = 0.0 if stats.mean == exact else float("inf")
    return LemmaReport(
        lemma="mono-parallel",
        exact=exact,
        empirical=stats.mean,
        z_score=z,
        z_threshold=z_threshold,
        passed=abs(z) <= z_threshold,
        details={"n": n, "k": k, "q": q, "trials": trials, "stderr": stats.stderr},
    )


def run_connectivity_lemma(
    n: int,
    k: int,
    trials: int,
    seed: RngLike = None,
    z_threshold: float = 3.0,
    min_frequency: float = 0.99,
    max_frequency: float = 0.2,
) -> LemmaReport:
    """Connectivity is an asymptotic claim with no finite-n formula, so this
    report carries no z-score; it checks the finite-size sanity bounds
    (frequency >= min_frequency for k >= 2, <= max_frequency for k = 1)."""
    freq = estimate_connectivity(n, k, trials, seed)
    passed = freq >= min_frequency if k >= 2 else freq <= max_frequency
    return LemmaReport(
        lemma="connectivity",
        exact=None,
        empirical=freq,
        z_score=None,
        z_threshold=z_threshold,
        passed=passed,
        details={"n": n, "k": k, "trials": trials},
    )
