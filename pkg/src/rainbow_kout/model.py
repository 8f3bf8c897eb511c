"""Samplers and data types for randomly coloured k-out multigraphs.

A k-out multigraph on n vertices has every vertex independently choose k
distinct neighbours, giving kn owned edges. A balanced colouring spreads q
colours over those edges so that each colour appears either rho = kn // q
or rho + 1 times; the colours appearing rho + 1 times are "popular" and
carry one designated "special" copy each. The same coloured object can be
sampled through a bipartite vertex-colour incidence multigraph (the
configuration-model route) whose boxes are opened afterwards.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

__all__ = [
    "Seed",
    "RngLike",
    "as_generator",
    "MultiGraph",
    "Colouring",
    "BipartiteColourGraph",
    "balanced_profile",
    "generate_kout",
    "assign_balanced_colouring",
    "couple_add_colour",
    "generate_gamma",
    "gamma_to_coloured_kout",
    "interchange_dict",
    "parse_interchange",
    "write_interchange",
    "read_interchange",
]


@dataclass(frozen=True)
class Seed:
    """Reproducible RNG handle: a 64-bit master seed plus a stream index.

    Identical (master, stream) pairs reproduce identical samples within one
    build. Trial-parallel code derives one stream per trial index, so results
    cannot depend on worker scheduling.
    """

    master: int
    stream: int = 0

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.master, spawn_key=(self.stream,))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.sequence())

    def split(self, count: int) -> list[np.random.Generator]:
        """Independent child generators (e.g. one for the graph, one for the
        colouring of the same trial)."""
        return [np.random.default_rng(s) for s in self.sequence().spawn(count)]


RngLike = Union[Seed, np.random.Generator, int, None]


def as_generator(seed: RngLike) -> np.random.Generator:
    """Normalise a Seed / int / Generator / None to a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.rng()
    if seed is None:
        return np.random.default_rng()
    return Seed(int(seed)).rng()


def balanced_profile(num_edges: int, q: int) -> tuple[int, int]:
    """Return (rho, num_popular) for q colours over num_edges slots."""
    if not 1 <= q <= num_edges:
        raise ValueError("colour count q must satisfy 1 <= q <= kn")
    rho = num_edges // q
    return rho, num_edges - q * rho


@dataclass
class MultiGraph:
    """A k-out multigraph: vertex v owns edges v*k .. v*k + k - 1.

    targets[v, j] is the endpoint of edge id v*k + j, so edge ids are
    0..kn-1 with owner = edge_id // k. Parallel edges (u chooses v and v
    chooses u) are permitted; loops and repeated targets per owner are not.
    """

    n: int
    k: int
    targets: np.ndarray

    @property
    def num_edges(self) -> int:
        return self.n * self.k

    def owner(self, edge_id: int) -> int:
        return edge_id // self.k

    def endpoints(self, edge_id: int) -> tuple[int, int]:
        v, j = divmod(edge_id, self.k)
        return v, int(self.targets[v, j])

    def endpoint_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(owners, targets) as flat arrays indexed by edge id."""
        owners = np.repeat(np.arange(self.n, dtype=np.int64), self.k)
        return owners, self.targets.reshape(-1)

    def edge_list(self) -> list[tuple[int, int, int]]:
        owners, targets = self.endpoint_arrays()
        return [(e, int(owners[e]), int(targets[e])) for e in range(self.num_edges)]

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError("vertex count must be at least 2")
        if not 1 <= self.k <= self.n - 1:
            raise ValueError("out-degree k must satisfy 1 <= k <= n-1")
        if self.targets.shape != (self.n, self.k):
            raise ValueError("targets must have shape (n, k)")
        if self.targets.min() < 0 or self.targets.max() >= self.n:
            raise ValueError("edge target out of vertex range")
        rows = np.arange(self.n)[:, None]
        if np.any(self.targets == rows):
            raise ValueError("loop edge: a vertex chose itself")
        if self.k > 1:
            srt = np.sort(self.targets, axis=1)
            if np.any(srt[:, 1:] == srt[:, :-1]):
                raise ValueError("repeated target: a vertex chose the same neighbour twice")


@dataclass
class Colouring:
    """An assignment of q colours to the kn edge slots of a k-out sample.

    colour_of[e] is the colour of edge e. special_edge_of maps each popular
    colour to the edge carrying its special copy. rho and num_popular are
    derived from (kn, q); validate() checks the balanced multiplicity profile.
    """

    q: int
    colour_of: np.ndarray
    special_edge_of: dict[int, int] = field(default_factory=dict)

    @property
    def num_edges(self) -> int:
        return len(self.colour_of)

    @property
    def rho(self) -> int:
        return balanced_profile(self.num_edges, self.q)[0]

    @property
    def num_popular(self) -> int:
        return balanced_profile(self.num_edges, self.q)[1]

    def multiplicities(self) -> np.ndarray:
        return np.bincount(self.colour_of, minlength=self.q)

    def popular_colours(self) -> list[int]:
        mult = self.multiplicities()
        return [c for c in range(self.q) if mult[c] == self.rho + 1]

    def validate(self) -> None:
        kn = self.num_edges
        if not 1 <= self.q <= kn:
            raise ValueError("colour count q must satisfy 1 <= q <= kn")
        if self.colour_of.min() < 0 or self.colour_of.max() >= self.q:
            raise ValueError("edge colour out of range")
        rho, num_popular = balanced_profile(kn, self.q)
        mult = self.multiplicities()
        heavy = int(np.count_nonzero(mult == rho + 1))
        light = int(np.count_nonzero(mult == rho))
        if heavy + light != self.q or heavy != num_popular:
            raise ValueError(
                "colour multiplicities are not balanced: expected "
                f"{num_popular} colours x{rho + 1} and {self.q - num_popular} x{rho}"
            )
        if sorted(self.special_edge_of) != sorted(self.popular_colours()):
            raise ValueError("special marks must cover exactly the popular colours")
        for colour, edge in self.special_edge_of.items():
            if self.colour_of[edge] != colour:
                raise ValueError("special edge does not carry its own colour")


@dataclass
class BipartiteColourGraph:
    """Vertex-colour incidence multigraph sampled via the configuration model.

    Left side: n vertices with k points each; left point p belongs to vertex
    p // k. Right side: q colour vertices plus one dummy vertex (id q) that
    absorbs the special copies of popular colours. right[p] is the right
    vertex paired with left point p, colour[p] the colour behind that pairing
    (for special copies, the popular colour the dummy stands in for), and
    special[p] marks dummy pairings.

    Every left vertex has degree k. Colour vertices have degree rho and the
    dummy has degree num_popular; in the matched case q = n - 1 those all
    equal k, which is what makes the graph regular.
    """

    n: int
    k: int
    q: int
    right: np.ndarray
    colour: np.ndarray
    special: np.ndarray

    @property
    def num_edges(self) -> int:
        return self.n * self.k

    @property
    def dummy(self) -> int:
        return self.q

    def right_degrees(self) -> np.ndarray:
        return np.bincount(self.right, minlength=self.q + 1)

    def validate(self) -> None:
        kn = self.num_edges
        rho, num_popular = balanced_profile(kn, self.q)
        if len(self.right) != kn or len(self.colour) != kn or len(self.special) != kn:
            raise ValueError("incidence arrays must have length kn")
        if np.any(self.right[self.special] != self.q):
            raise ValueError("special incidences must attach to the dummy vertex")
        if np.any(self.right[~self.special] != self.colour[~self.special]):
            raise ValueError("non-special incidences must attach to their own colour")
        deg = self.right_degrees()
        if int(deg[self.q]) != num_popular:
            raise ValueError("dummy degree must equal the number of popular colours")
        if np.any(deg[: self.q] != rho):
            raise ValueError("every colour vertex must have degree rho")
        special_colours = np.sort(self.colour[self.special])
        if len(set(special_colours.tolist())) != num_popular:
            raise ValueError("special copies must cover distinct popular colours")


def _distinct_targets(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sample, per vertex, a uniform k-subset of the other n-1 vertices."""
    rows = np.arange(n, dtype=np.int64)[:, None]
    if 3 * k <= n - 1:
        # Rejection on rows with a repeat; cheap because collisions are rare.
        t = rng.integers(0, n - 1, size=(n, k), dtype=np.int64)
        if k > 1:
            while True:
                srt = np.sort(t, axis=1)
                bad = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
                if not bad.any():
                    break
                t[bad] = rng.integers(0, n - 1, size=(int(bad.sum()), k), dtype=np.int64)
        return t + (t >= rows)
    out = np.empty((n, k), dtype=np.int64)
    for v in range(n):
        row = rng.choice(n - 1, size=k, replace=False)
        out[v] = row + (row >= v)
    return out


def generate_kout(n: int, k: int, seed: RngLike = None) -> MultiGraph:
    """Sample a k-out multigraph: each vertex picks k distinct neighbours,
    every k-subset of the other vertices equally likely, independently
    across vertices.
    """
    if n < 2:
        raise ValueError("vertex count must be at least 2")
    if not 1 <= k <= n - 1:
        raise ValueError("out-degree k must satisfy 1 <= k <= n-1")
    rng = as_generator(seed)
    return MultiGraph(n=n, k=k, targets=_distinct_targets(n, k, rng))


def _draw_special_edges(
    colour_of: np.ndarray, counts: np.ndarray, popular: np.ndarray, rng: np.random.Generator
) -> dict[int, int]:
    """Pick, per popular colour, one of its edge slots uniformly as special."""
    order = np.argsort(colour_of, kind="stable")
    offsets = np.concatenate(([0], np.cumsum(counts)))
    specials: dict[int, int] = {}
    for c in popular.tolist():
        group = order[offsets[c] : offsets[c + 1]]
        specials[c] = int(group[rng.integers(len(group))])
    return specials


def assign_balanced_colouring(g: MultiGraph, q: int, seed: RngLike = None) -> Colouring:
    """Colour the kn edges with a uniform random bijection from the balanced
    colour multiset (num_popular colours x(rho+1), the rest xrho), then mark
    one uniform copy of each popular colour as special.

    Which colours are popular is itself a uniform choice; the model only
    fixes how many there are.
    """
    kn = g.num_edges
    if not 1 <= q <= kn:
        raise ValueError("colour count q must satisfy 1 <= q <= kn")
    rng = as_generator(seed)
    rho, num_popular = balanced_profile(kn, q)
    popular = np.sort(rng.choice(q, size=num_popular, replace=False)) if num_popular else np.empty(0, dtype=np.int64)
    counts = np.full(q, rho, dtype=np.int64)
    counts[popular] += 1
    multiset = np.repeat(np.arange(q, dtype=np.int64), counts)
    colour_of = multiset[rng.permutation(kn)]
    specials = _draw_special_edges(colour_of, counts, popular, rng)
    return Colouring(q=q, colour_of=colour_of, special_edge_of=specials)


def couple_add_colour(c: Colouring, seed: RngLike = None, dissolve=None) -> Colouring:
    """Refine a q-colour balanced colouring into a (q+1)-colour one, keeping
    as many colour classes as possible fixed on their edge slots.

    With rho = kn // q the refinement replaces whole colour classes and
    redistributes exactly their slots:

    * kn // (q+1) == rho: rho classes of size rho+1 are dissolved and their
      rho*(rho+1) slots recoloured as rho+1 fresh classes of size rho.
    * kn // (q+1) == rho - 1: all num_popular classes of size rho+1 plus
      rho-1-num_popular classes of size rho are dissolved; their slots become
      num_popular classes of size rho and rho-num_popular of size rho-1.

    Classes to dissolve are chosen uniformly among the eligible ones unless
    `dissolve` pins an explicit (valid) choice; the freed slots are then
    recoloured by a fresh uniform bijection. Every other edge keeps its
    colour. Raises when a one-step refinement of this shape does not exist:
    kn // (q+1) < rho - 1, or rho > q + 1 (both only possible for
    q(q+1) < kn).
    """
    kn = c.num_edges
    q = c.q
    if q + 1 > kn:
        raise ValueError("cannot refine: q+1 colours exceed the kn edge slots")
    rng = as_generator(seed)
    rho, num_popular = balanced_profile(kn, q)
    rho_new = balanced_profile(kn, q + 1)[0]

    mult = c.multiplicities()
    popular = [col for col in range(q) if mult[col] == rho + 1]
    unpopular = [col for col in range(q) if mult[col] == rho]

    if rho_new == rho:
        if dissolve is None:
            replaced = sorted(rng.choice(popular, size=rho, replace=False).tolist())
        else:
            replaced = sorted(int(col) for col in dissolve)
            if len(replaced) != rho or not set(replaced) <= set(popular) or len(set(replaced)) != rho:
                raise ValueError(f"dissolve must name exactly {rho} distinct popular classes")
        new_sizes = [rho] * (rho + 1)
    elif rho_new == rho - 1:
        if rho - 1 - num_popular > len(unpopular):
            raise ValueError(
                "refinement undefined: not enough colour classes to dissolve "
                f"(rho={rho} exceeds q+1={q + 1})"
            )
        if dissolve is None:
            extra = rng.choice(unpopular, size=rho - 1 - num_popular, replace=False)
            replaced = sorted(popular + extra.tolist())
        else:
            replaced = sorted(int(col) for col in dissolve)
            extras = set(replaced) - set(popular)
            if (
                len(set(replaced)) != len(replaced)
                or not set(popular) <= set(replaced)
                or len(extras) != rho - 1 - num_popular
                or not extras <= set(unpopular)
            ):
                raise ValueError(
                    f"dissolve must name all {num_popular} popular classes plus "
                    f"{rho - 1 - num_popular} unpopular ones"
                )
        new_sizes = [rho] * num_popular + [rho - 1] * (rho - num_popular)
    else:
        raise ValueError(
            "refinement undefined: kn // (q+1) dropped from "
            f"{rho} to {rho_new}; needs q(q+1) >= kn"
        )

    replaced_set = set(replaced)
    freed = np.flatnonzero(np.isin(c.colour_of, replaced))
    new_ids = np.array(replaced + [q], dtype=np.int64)
    sizes = np.array(new_sizes, dtype=np.int64)[rng.permutation(len(new_sizes))]
    multiset = np.repeat(new_ids, sizes)
    colour_of = c.colour_of.copy()
    colour_of[freed] = multiset[rng.permutation(len(freed))]

    counts_new = np.bincount(colour_of, minlength=q + 1)
    popular_new = np.flatnonzero(counts_new == rho_new + 1)
    specials: dict[int, int] = {}
    fresh: list[int] = []
    for col in popular_new.tolist():
        if rho_new == rho and col not in replaced_set and col in c.special_edge_of:
            specials[col] = c.special_edge_of[col]  # class untouched, mark kept
        else:
            fresh.append(col)
    if fresh:
        drawn = _draw_special_edges(colour_of, counts_new, np.array(fresh, dtype=np.int64), rng)
        specials.update(drawn)
    return Colouring(q=q + 1, colour_of=colour_of, special_edge_of=specials)


def generate_gamma(n: int, k: int, q: int, seed: RngLike = None) -> BipartiteColourGraph:
    """Sample the vertex-colour incidence multigraph by uniformly pairing the
    kn left points (k per vertex) with the kn colour-copy points. Non-special
    copies sit on their colour's right vertex; special copies sit on the
    dummy.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    kn = n * k
    if not 1 <= q <= kn:
        raise ValueError("colour count q must satisfy 1 <= q <= kn")
    rng = as_generator(seed)
    rho, num_popular = balanced_profile(kn, q)
    popular = np.sort(rng.choice(q, size=num_popular, replace=False)) if num_popular else np.empty(0, dtype=np.int64)
    point_colour = np.concatenate([np.repeat(np.arange(q, dtype=np.int64), rho), popular])
    point_special = np.zeros(kn, dtype=bool)
    point_special[q * rho :] = True
    perm = rng.permutation(kn)
    colour = point_colour[perm]
    special = point_special[perm]
    right = np.where(special, q, colour)
    return BipartiteColourGraph(n=n, k=k, q=q, right=right, colour=colour, special=special)


def gamma_to_coloured_kout(gamma: BipartiteColourGraph, seed: RngLike = None) -> tuple[MultiGraph, Colouring]:
    """Open the boxes of an incidence graph: draw the actual k distinct
    targets per vertex, and colour edge v*k + j with the colour behind
    vertex v's j-th incidence. The joint output distribution equals
    (generate_kout, assign_balanced_colouring).
    """
    g = generate_kout(gamma.n, gamma.k, seed)
    colour_of = gamma.colour.copy()
    specials = {int(gamma.colour[p]): int(p) for p in np.flatnonzero(gamma.special)}
    return g, Colouring(q=gamma.q, colour_of=colour_of, special_edge_of=specials)


# -- interchange file format -------------------------------------------------
#
# {"n": ..., "k": ..., "q": ..., "edges": [{"id", "owner", "target", "colour",
# "special"}, ...]} with 0-based ids. Parsing is deliberately lenient about
# model invariants (hand-written files may contain loops or unbalanced
# colourings; the solver treats those soundly) but strict about structure.


def interchange_dict(g: MultiGraph, c: Colouring) -> dict:
    special_edges = set(c.special_edge_of.values())
    owners, targets = g.endpoint_arrays()
    edges = [
        {
            "id": e,
            "owner": int(owners[e]),
            "target": int(targets[e]),
            "colour": int(c.colour_of[e]),
            "special": e in special_edges,
        }
        for e in range(g.num_edges)
    ]
    return {"n": g.n, "k": g.k, "q": c.q, "edges": edges}


def parse_interchange(obj: dict) -> tuple[MultiGraph, Colouring]:
    """Parse an interchange dict; raises ValueError naming the violated
    structural constraint."""
    try:
        n, k, q = int(obj["n"]), int(obj["k"]), int(obj["q"])
        raw_edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"missing or malformed top-level field: {exc}") from exc
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    kn = n * k
    if not 1 <= q <= kn:
        raise ValueError("colour count q must satisfy 1 <= q <= kn")
    if len(raw_edges) != kn:
        raise ValueError(f"expected exactly {kn} edges, found {len(raw_edges)}")
    targets = np.full((n, k), -1, dtype=np.int64)
    colour_of = np.full(kn, -1, dtype=np.int64)
    specials: dict[int, int] = {}
    for item in raw_edges:
        try:
            e = int(item["id"])
            owner = int(item["owner"])
            target = int(item["target"])
            colour = int(item["colour"])
            special = bool(item["special"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed edge record: {exc}") from exc
        if not 0 <= e < kn:
            raise ValueError(f"edge id {e} out of range 0..{kn - 1}")
        if owner != e // k:
            raise ValueError(f"edge {e} must be owned by vertex {e // k}, not {owner}")
        if not 0 <= target < n:
            raise ValueError(f"edge {e} target {target} out of vertex range")
        if not 0 <= colour < q:
            raise ValueError(f"edge {e} colour {colour} out of range 0..{q - 1}")
        if colour_of[e] != -1:
            raise ValueError(f"duplicate edge id {e}")
        targets[e // k, e % k] = target
        colour_of[e] = colour
        if special:
            if colour in specials:
                raise ValueError(f"colour {colour} has more than one special edge")
            specials[colour] = e
    return MultiGraph(n=n, k=k, targets=targets), Colouring(q=q, colour_of=colour_of, special_edge_of=specials)


def write_interchange(fp: IO[str], g: MultiGraph, c: Colouring) -> None:
    json.dump(interchange_dict(g, c), fp, indent=1)
    fp.write("\n")


def read_interchange(fp: IO[str]) -> tuple[MultiGraph, Colouring]:
    return parse_interchange(json.load(fp))
