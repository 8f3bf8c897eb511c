"""Maximum rainbow forests by matroid intersection, rainbow-spanning-tree
decisions, and failure certificates.

The solver grows a common independent set of the graphic and colour
partition matroids by shortest augmenting paths in the exchange digraph.
The search runs breadth-first from the colour-addable edges (colour unused
by the solution) towards the forest-addable ones (endpoints in different
components); steps alternate between walking the forest cycle of an outside
edge (swap keeps the forest property) and jumping to the outside edges that
share a solution edge's colour (swap keeps the rainbow property). Arcs are
generated lazily while the search runs, so a phase only pays for the part
of the exchange graph it actually visits, and one search can harvest
several paths with pairwise disjoint component/colour footprints, which are
then applied (and re-verified) one augmentation at a time.

When no augmenting path exists, the search's reachable set is the graphic
side of a minimising cut and the colours occurring on the unreached side
give, complemented, a colour set I whose edges span too few components.
That certifies that no rainbow spanning tree exists; the certificate is
re-verified before it is returned.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .matroid import DisjointSetForest, kappa
from .model import Colouring, MultiGraph

__all__ = [
    "CommonIndependentSet",
    "Certificate",
    "RainbowResult",
    "IntersectionOutcome",
    "InternalInconsistencyError",
    "max_rainbow_forest",
    "find_rst",
    "extract_certificate",
    "check_condition",
    "brute_force_max_rainbow_forest",
    "result_dict",
]


class InternalInconsistencyError(RuntimeError):
    """A solver self-check failed; never silently ignored."""


@dataclass(frozen=True)
class CommonIndependentSet:
    """An edge set independent in both matroids: a rainbow forest."""

    edges: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Certificate:
    """A colour set I violating kappa(C_I) <= q + 1 - |I|, witnessing that no
    rainbow spanning tree exists. deficiency = kappa(C_I) - (q + 1 - |I|) >= 1.
    """

    colours: tuple[int, ...]
    kappa_value: int
    deficiency: int


@dataclass(frozen=True)
class RainbowResult:
    """Either a rainbow spanning tree or a certificate that none exists."""

    status: str  # "tree" | "no_tree"
    tree_edges: tuple[int, ...] | None
    certificate: Certificate | None

    @property
    def is_tree(self) -> bool:
        return self.status == "tree"


@dataclass(frozen=True)
class IntersectionOutcome:
    """Final solver state: the maximum rainbow forest, plus (when the last
    augmenting search failed) a per-edge flag marking the edges the search
    reached from the colour-addable sources."""

    edges: tuple[int, ...]
    reached: tuple[bool, ...] | None

    @property
    def size(self) -> int:
        return len(self.edges)


def _verify_common_independent(n, q, owner, target, colour, in_solution) -> int:
    """Recheck both independence properties from scratch; returns the size.
    Inlined union-find keeps this cheap enough to run after every
    augmentation."""
    parent = list(range(n))
    seen = bytearray(q)
    size = 0
    for e, inside in enumerate(in_solution):
        if not inside:
            continue
        col = colour[e]
        if seen[col]:
            raise InternalInconsistencyError("augmentation produced a colour clash")
        seen[col] = 1
        u = owner[e]
        v = target[e]
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        if u == v:
            raise InternalInconsistencyError("augmentation produced a cycle")
        parent[u] = v
        size += 1
    return size


_MAX_SINKS_PER_PHASE = 32


def _search_phase(n, q, owner, target, colour, in_solution):
    """One augmenting search. Returns ("augment", paths) with paths a list
    of augmenting paths (each a list of edge ids to toggle), or
    ("fail", prev) where prev[e] != -2 marks the edges reached from the
    colour-addable sources.

    Adjacency and per-colour candidate lists are array-backed linked lists,
    rebuilt per phase in O(n + m) with no per-vertex allocation; the tree
    paths that realise the forest swaps are walked lazily, only for edges
    the search actually visits.

    Several shortest augmenting paths are harvested per search as long as
    their footprints (the forest components and the colours they touch) are
    pairwise disjoint: applying one such path cannot alter the exchange
    relations of another, so the batch is equivalent to running the paths
    in separate searches. The caller still re-verifies after every single
    augmentation.
    """
    m = len(colour)

    # Solution edge e occupies directed slots 2e (at its owner) and 2e+1
    # (at its target); head/slot_next link the slots per vertex.
    head = [-1] * n
    slot_next = [-1] * (2 * m)
    colour_used = bytearray(q)
    out_head = [-1] * q  # colour -> chain of outside edges carrying it
    out_next = [-1] * m
    for e in range(m - 1, -1, -1):
        if in_solution[e]:
            u = owner[e]
            v = target[e]
            s = 2 * e
            slot_next[s] = head[u]
            head[u] = s
            s += 1
            slot_next[s] = head[v]
            head[v] = s
            colour_used[colour[e]] = 1
        else:
            col = colour[e]
            out_next[e] = out_head[col]
            out_head[col] = e

    comp = [-1] * n
    par_v = [0] * n
    par_e = [-1] * n
    depth = [0] * n
    cid = 0
    for root in range(n):
        if comp[root] != -1:
            continue
        comp[root] = cid
        stack = [root]
        while stack:
            u = stack.pop()
            s = head[u]
            d1 = depth[u] + 1
            while s != -1:
                e = s >> 1
                w = owner[e] if s & 1 else target[e]
                if comp[w] == -1:
                    comp[w] = cid
                    par_v[w] = u
                    par_e[w] = e
                    depth[w] = d1
                    stack.append(w)
                s = slot_next[s]
        cid += 1

    prev = [-2] * m  # -2 unvisited, -1 source
    queue = deque()
    sinks: list[int] = []
    for x in range(m):
        if in_solution[x] or colour_used[colour[x]]:
            continue
        prev[x] = -1
        if comp[owner[x]] != comp[target[x]]:
            sinks.append(x)  # addable to both matroids outright
        else:
            queue.append(x)

    # Sinks are terminal either way: a component-joining edge has no forest
    # cycle to walk, so collecting it never hides other reachable elements.
    while queue and len(sinks) < _MAX_SINKS_PER_PHASE:
        el = queue.popleft()
        if in_solution[el]:
            # swap partner candidates: outside edges carrying el's colour
            x = out_head[colour[el]]
            while x != -1:
                if prev[x] == -2:
                    prev[x] = el
                    if comp[owner[x]] != comp[target[x]]:
                        sinks.append(x)
                    else:
                        queue.append(x)
                x = out_next[x]
        else:
            # walk el's forest cycle; every solution edge on it is swappable
            a = owner[el]
            b = target[el]
            da, db = depth[a], depth[b]
            while da > db:
                y = par_e[a]
                if prev[y] == -2:
                    prev[y] = el
                    queue.append(y)
                a = par_v[a]
                da -= 1
            while db > da:
                y = par_e[b]
                if prev[y] == -2:
                    prev[y] = el
                    queue.append(y)
                b = par_v[b]
                db -= 1
            while a != b:
                y = par_e[a]
                if prev[y] == -2:
                    prev[y] = el
                    queue.append(y)
                a = par_v[a]
                y = par_e[b]
                if prev[y] == -2:
                    prev[y] = el
                    queue.append(y)
                b = par_v[b]
    if not sinks:
        return "fail", prev

    # Harvest compatible paths, applied later in this order. A later path
    # stays a valid augmentation provided that (a) its colours are untouched,
    # (b) its sink still joins two different components (batch-level
    # union-find over component ids), and (c) the full forest paths backing
    # its cycle-walk arcs avoid every solution edge removed so far: then
    # those paths survive verbatim, and forest paths are unique.
    paths: list[list[int]] = []
    used_colours: set[int] = set()
    removed: set[int] = set()
    comp_parent: dict[int, int] = {}

    def comp_find(a: int) -> int:
        root = a
        while comp_parent.get(root, root) != root:
            root = comp_parent[root]
        while comp_parent.get(a, a) != a:
            comp_parent[a], a = root, comp_parent[a]
        return root

    for sink in sinks:
        path = [sink]
        while prev[path[-1]] != -1:
            path.append(prev[path[-1]])
        cols = {colour[e] for e in path}
        if cols & used_colours:
            continue
        ca = comp_find(comp[owner[sink]])
        cb = comp_find(comp[target[sink]])
        if ca == cb:
            continue
        walked: set[int] = set()
        for e in path[1:]:
            if in_solution[e]:
                continue
            # full forest path between e's endpoints
            a = owner[e]
            b = target[e]
            da, db = depth[a], depth[b]
            while da > db:
                walked.add(par_e[a])
                a = par_v[a]
                da -= 1
            while db > da:
                walked.add(par_e[b])
                b = par_v[b]
                db -= 1
            while a != b:
                walked.add(par_e[a])
                a = par_v[a]
                walked.add(par_e[b])
                b = par_v[b]
        if walked & removed:
            continue
        used_colours |= cols
        removed.update(e for e in path if in_solution[e])
        comp_parent[ca] = cb
        paths.append(path)
    return "augment", paths


def _run_intersection(g: MultiGraph, c: Colouring) -> IntersectionOutcome:
    n, k, q = g.n, g.k, c.q
    m = g.num_edges
    owner = [e // k for e in range(m)]
    target = g.targets.reshape(-1).tolist()
    colour = c.colour_of.tolist()

    # Greedy rainbow forest in edge-id order cuts the augmentation count.
    in_solution = [False] * m
    dsf = DisjointSetForest(n)
    colour_used = bytearray(q)
    size = 0
    for e in range(m):
        col = colour[e]
        if colour_used[col]:
            continue
        u = owner[e]
        v = target[e]
        if u != v and dsf.union(u, v):
            colour_used[col] = 1
            in_solution[e] = True
            size += 1

    reached: tuple[bool, ...] | None = None
    while size < n - 1:
        kind, payload = _search_phase(n, q, owner, target, colour, in_solution)
        if kind == "fail":
            reached = tuple(p != -2 for p in payload)
            break
        for index, path in enumerate(payload):
            if size >= n - 1:
                break
            for e in path:
                in_solution[e] = not in_solution[e]
            size += 1
            try:
                verified = _verify_common_independent(n, q, owner, target, colour, in_solution)
                if verified != size:
                    raise InternalInconsistencyError("augmentation did not grow the solution by one")
            except InternalInconsistencyError:
                if index == 0:
                    raise  # a lone shortest path must always apply cleanly
                # later batch entries are only an optimisation: undo and rescan
                for e in path:
                    in_solution[e] = not in_solution[e]
                size -= 1
                break

    edges = tuple(e for e in range(m) if in_solution[e])
    return IntersectionOutcome(edges=edges, reached=reached)


def max_rainbow_forest(g: MultiGraph, c: Colouring) -> CommonIndependentSet:
    """Maximum-cardinality edge set that is simultaneously a forest and
    rainbow. Deterministic given (g, c)."""
    return CommonIndependentSet(edges=_run_intersection(g, c).edges)


def extract_certificate(g: MultiGraph, c: Colouring, outcome: IntersectionOutcome) -> Certificate:
    """Read a violating colour set off the final failed search.

    The cut (E1, E2) with E1 the reached edges (graphic rank) and E2 the
    rest (colour rank) realises the minimum of r1(E1) + r2(E2). Growing E2
    to all edges coloured with J = colours(E2) preserves the minimum, so
    I = Q \\ J satisfies kappa(C_I) >= q - |I| + 2. Both facts are checked
    here; a failure raises InternalInconsistencyError rather than returning
    a bogus certificate.
    """
    if outcome.reached is None:
        raise ValueError("solver found a spanning tree; there is no certificate to extract")
    q = c.q
    m = g.num_edges
    reached = outcome.reached
    colour_of = c.colour_of
    occurring = {int(colour_of[e]) for e in range(m) if not reached[e]}
    reached_edges = [e for e in range(m) if reached[e]]
    dual_value = (g.n - kappa(g, reached_edges)) + len(occurring)
    if dual_value != outcome.size:
        raise InternalInconsistencyError(
            f"duality gap: cut value {dual_value} != solution size {outcome.size}"
        )
    colours = tuple(sorted(set(range(q)) - occurring))
    members = set(colours)
    c_i_edges = [e for e in range(m) if int(colour_of[e]) in members]
    kappa_value = kappa(g, c_i_edges)
    deficiency = kappa_value - (q + 1 - len(colours))
    if deficiency < 1:
        raise InternalInconsistencyError(
            f"certificate failed re-verification: kappa={kappa_value}, "
            f"|I|={len(colours)}, q={q}"
        )
    return Certificate(colours=colours, kappa_value=kappa_value, deficiency=deficiency)


def find_rst(g: MultiGraph, c: Colouring) -> RainbowResult:
    """Decide rainbow-spanning-tree existence: a tree iff the maximum rainbow
    forest has n - 1 edges, otherwise a verified certificate."""
    outcome = _run_intersection(g, c)
    if outcome.size == g.n - 1:
        return RainbowResult(status="tree", tree_edges=outcome.edges, certificate=None)
    return RainbowResult(status="no_tree", tree_edges=None, certificate=extract_certificate(g, c, outcome))


def check_condition(g: MultiGraph, c: Colouring, colours) -> bool:
    """True iff kappa(C_I) <= q + 1 - |I| for the given colour set I."""
    members = set(int(col) for col in colours)
    colour_of = c.colour_of
    edges = [e for e in range(g.num_edges) if int(colour_of[e]) in members]
    return kappa(g, edges) <= c.q + 1 - len(members)


def brute_force_max_rainbow_forest(g: MultiGraph, c: Colouring) -> CommonIndependentSet:
    """Exact maximum rainbow forest by recursive enumeration with forest,
    colour and component-count pruning. Test oracle; refuses kn > 24."""
    m = g.num_edges
    if m > 24:
        raise ValueError("enumeration oracle only accepts kn <= 24")
    n, k = g.n, g.k
    target = g.targets.reshape(-1).tolist()
    colour = c.colour_of.tolist()
    q = c.q

    best: list[int] = []
    chosen: list[int] = []
    used = set()

    def extend(start: int, labels: list[int], components: int) -> None:
        if len(chosen) > len(best):
            best[:] = chosen
        for e in range(start, m):
            if len(chosen) + min(m - e, components - 1, q - len(used)) <= len(best):
                return
            col = colour[e]
            if col in used:
                continue
            u = e // k
            v = target[e]
            lu, lv = labels[u], labels[v]
            if lu == lv:
                continue
            merged = [lu if lab == lv else lab for lab in labels]
            chosen.append(e)
            used.add(col)
            extend(e + 1, merged, components - 1)
            chosen.pop()
            used.remove(col)

    extend(0, list(range(n)), n)
    return CommonIndependentSet(edges=tuple(best))


def result_dict(result: RainbowResult) -> dict:
    """Result file payload: status, tree edge ids, certificate."""
    cert = None
    if result.certificate is not None:
        cert = {
            "colours": list(result.certificate.colours),
            "kappa": result.certificate.kappa_value,
        }
    return {
        "status": result.status,
        "tree_edges": list(result.tree_edges) if result.tree_edges is not None else None,
        "certificate": cert,
    }
