"""Signed weighted digraphs and their cactus decompositions.

A network is a directed graph whose edges carry a sign class (excitatory
or inhibitory) and a weight confined to the sign class bounds.  Selected
nodes receive external input (with a scalar gain) and selected nodes are
observed.  On top of the raw graph this module implements the cactus
vocabulary used by the structural analyses:

  stem     - a simple directed path,
  bud      - a directed cycle plus a distinguished edge from a dangling
             node into the cycle,
  cactus   - a stem with buds attached so that each bud meets the earlier
             structure exactly in its dangling node,
  generalized cactus - a graph spanned by a disjoint union of cacti whose
             stem heads (roots) are input nodes.

Decompositions are declared data: callers state the stems and buds and
`validate_generalized_cactus` checks every rule, returning violations as
values rather than raising.  Extra edges beyond the declared skeleton are
always permitted (spanning semantics).

All graph values are immutable after construction and all operations are
pure functions, so they are safe to share across worker processes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GraphError",
    "Edge",
    "WeightBounds",
    "SignedDigraph",
    "Bud",
    "CactusDecomposition",
    "CactusVerdict",
    "CascadePart",
    "CascadeLink",
    "build_graph",
    "max_in_degree",
    "validate_generalized_cactus",
    "drop_elements",
    "drop_impact_flags",
    "compose_cascade",
    "find_disjoint_input_paths",
    "reachable_from",
    "random_cactus",
]


class GraphError(ValueError):
    """Raised for malformed graphs, decompositions or drop requests."""


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    sign: str  # "+" or "-"
    weight: float


@dataclass(frozen=True)
class WeightBounds:
    """Per-sign-class weight bounds.

    Positive edges live in [pos_min, pos_max] with 0 < pos_min, negative
    edges in [neg_min, neg_max] with neg_max < 0.
    """

    pos_min: float
    pos_max: float
    neg_min: float
    neg_max: float

    def __post_init__(self):
        if not (0.0 < self.pos_min <= self.pos_max):
            raise GraphError(
                f"positive bounds must satisfy 0 < min <= max, got "
                f"[{self.pos_min}, {self.pos_max}]"
            )
        if not (self.neg_min <= self.neg_max < 0.0):
            raise GraphError(
                f"negative bounds must satisfy min <= max < 0, got "
                f"[{self.neg_min}, {self.neg_max}]"
            )

    def interval(self, sign: str) -> tuple[float, float]:
        if sign == "+":
            return self.pos_min, self.pos_max
        return self.neg_min, self.neg_max

    def coupling_bound(self) -> float:
        """max of the largest positive bound and largest negative magnitude."""
        return max(self.pos_max, abs(self.neg_min))


@dataclass(frozen=True)
class SignedDigraph:
    """Immutable signed weighted digraph with input and output designations.

    Weight convention: the edge (j, i) feeds node i, so the adjacency
    matrix entry A[i, j] holds the weight of the edge from j to i.
    Input gains are the nonzero scalars b_k attached to the input nodes;
    the input matrix B has one canonical-vector column per input node.
    """

    node_labels: tuple[str, ...]
    edges: tuple[Edge, ...]
    bounds: WeightBounds
    input_gains: tuple[tuple[int, float], ...]  # sorted by node index
    output_nodes: tuple[int, ...]

    def __post_init__(self):
        n = len(self.node_labels)
        if n == 0:
            raise GraphError("graph needs at least one node")
        if len(set(self.node_labels)) != n:
            raise GraphError("duplicate node labels")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise GraphError(f"edge ({e.src},{e.dst}) references unknown node")
            if (e.src, e.dst) in seen:
                raise GraphError(
                    f"duplicate edge {self.node_labels[e.src]} -> "
                    f"{self.node_labels[e.dst]}"
                )
            seen.add((e.src, e.dst))
            if e.sign not in ("+", "-"):
                raise GraphError(f"edge sign must be '+' or '-', got {e.sign!r}")
            lo, hi = self.bounds.interval(e.sign)
            if not (lo <= e.weight <= hi):
                raise GraphError(
                    f"weight {e.weight} of {e.sign} edge "
                    f"{self.node_labels[e.src]} -> {self.node_labels[e.dst]} "
                    f"outside [{lo}, {hi}]"
                )
        for k, gain in self.input_gains:
            if not (0 <= k < n):
                raise GraphError(f"input node {k} out of range")
            if gain == 0.0:
                raise GraphError(f"input gain at node {self.node_labels[k]} is zero")
        if len({k for k, _ in self.input_gains}) != len(self.input_gains):
            raise GraphError("duplicate input node")
        for o in self.output_nodes:
            if not (0 <= o < n):
                raise GraphError(f"output node {o} out of range")
        if len(set(self.output_nodes)) != len(self.output_nodes):
            raise GraphError("duplicate output node")

    # ---- basic queries ----------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.node_labels)

    @property
    def input_nodes(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.input_gains)

    def index_of(self, label: str) -> int:
        try:
            return self.node_labels.index(label)
        except ValueError:
            raise GraphError(f"unknown node label {label!r}") from None

    def has_edge(self, src: int, dst: int) -> bool:
        return any(e.src == src and e.dst == dst for e in self.edges)

    def successors(self, node: int) -> list[int]:
        return sorted(e.dst for e in self.edges if e.src == node)

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_nodes, dtype=int)
        for e in self.edges:
            deg[e.dst] += 1
        return deg

    # ---- matrix views -----------------------------------------------------

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n_nodes, self.n_nodes))
        for e in self.edges:
            A[e.dst, e.src] = e.weight
        return A

    def sign_matrix(self) -> np.ndarray:
        S = np.zeros((self.n_nodes, self.n_nodes))
        for e in self.edges:
            S[e.dst, e.src] = 1.0 if e.sign == "+" else -1.0
        return S

    def lower_bound_matrix(self) -> np.ndarray:
        L = np.zeros((self.n_nodes, self.n_nodes))
        for e in self.edges:
            L[e.dst, e.src] = self.bounds.interval(e.sign)[0]
        return L

    def upper_bound_matrix(self) -> np.ndarray:
        U = np.zeros((self.n_nodes, self.n_nodes))
        for e in self.edges:
            U[e.dst, e.src] = self.bounds.interval(e.sign)[1]
        return U

    def input_matrix(self) -> np.ndarray:
        B = np.zeros((self.n_nodes, len(self.input_gains)))
        for col, (k, gain) in enumerate(self.input_gains):
            B[k, col] = gain
        return B

    def output_matrix(self) -> np.ndarray:
        C = np.zeros((len(self.output_nodes), self.n_nodes))
        for row, o in enumerate(self.output_nodes):
            C[row, o] = 1.0
        return C


def build_graph(
    nodes,
    edges,
    inputs,
    outputs=(),
    bounds: WeightBounds | None = None,
) -> SignedDigraph:
    """Assemble and validate a SignedDigraph from label-based parts.

    nodes: sequence of labels.  edges: (src_label, dst_label, sign, weight)
    tuples.  inputs: (label, gain) pairs or bare labels (gain 1).  All
    structural errors raise GraphError with the offending element named.
    """
    labels = tuple(str(x) for x in nodes)
    index = {lab: i for i, lab in enumerate(labels)}
    if bounds is None:
        bounds = WeightBounds(0.1, 1.2, -1.2, -0.1)

    def look(lab) -> int:
        lab = str(lab)
        if lab not in index:
            raise GraphError(f"unknown node label {lab!r}")
        return index[lab]

    edge_objs = tuple(
        Edge(look(s), look(d), str(sign), float(w)) for s, d, sign, w in edges
    )
    gain_pairs = []
    for item in inputs:
        if isinstance(item, (tuple, list)):
            lab, gain = item
        else:
            lab, gain = item, 1.0
        gain_pairs.append((look(lab), float(gain)))
    gain_pairs.sort()
    out = tuple(sorted(look(o) for o in outputs))
    return SignedDigraph(labels, edge_objs, bounds, tuple(gain_pairs), out)


def max_in_degree(g: SignedDigraph) -> int:
    """Largest number of incoming edges over all nodes (0 if edgeless)."""
    if not g.edges:
        return 0
    return int(g.in_degrees().max())


def reachable_from(g: SignedDigraph, sources) -> set[int]:
    """Set of nodes reachable from `sources` by directed BFS."""
    adj: dict[int, list[int]] = {}
    for e in g.edges:
        adj.setdefault(e.src, []).append(e.dst)
    seen = set(int(s) for s in sources)
    queue = deque(sorted(seen))
    while queue:
        u = queue.popleft()
        for v in sorted(adj.get(u, ())):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


# ---------------------------------------------------------------------------
# cactus decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Bud:
    """A directed cycle attached to the rest of a cactus.

    `cycle` lists the cycle nodes in edge order (consecutive pairs and the
    wraparound pair must be edges).  `dangling` is the attachment node,
    which lives on the stem or on an earlier bud's cycle, and `edge` is the
    distinguished edge oriented from the dangling node into the cycle.
    """

    cycle: tuple[int, ...]
    dangling: int
    edge: tuple[int, int]


@dataclass(frozen=True)
class CactusDecomposition:
    stems: tuple[tuple[int, ...], ...]
    buds: tuple[Bud, ...] = ()
    cross_links: tuple[tuple[int, int], ...] = ()

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(stem[0] for stem in self.stems)

    @property
    def extremities(self) -> tuple[int, ...]:
        return tuple(stem[-1] for stem in self.stems)

    def covered_nodes(self) -> set[int]:
        nodes = {v for stem in self.stems for v in stem}
        for bud in self.buds:
            nodes.update(bud.cycle)
        return nodes

    def skeleton_edges(self) -> set[tuple[int, int]]:
        """Edges that realise the declared stems and buds."""
        edges: set[tuple[int, int]] = set()
        for stem in self.stems:
            edges.update(zip(stem, stem[1:]))
        for bud in self.buds:
            cyc = bud.cycle
            edges.update(zip(cyc, cyc[1:]))
            edges.add((cyc[-1], cyc[0]))
            edges.add(bud.edge)
        return edges


@dataclass(frozen=True)
class CactusVerdict:
    accepted: bool
    violations: tuple[str, ...]
    extra_edges: tuple[tuple[int, int], ...] = ()

    def __bool__(self) -> bool:
        return self.accepted


def validate_generalized_cactus(
    g: SignedDigraph, d: CactusDecomposition
) -> CactusVerdict:
    """Check a declared decomposition against the graph it describes.

    Accepted iff the stems and bud cycles span every node exactly once,
    every declared skeleton edge exists, each bud meets the earlier
    structure of its cactus only in its dangling node, and every stem head
    is an input node.  Any edge outside the skeleton is a permitted extra
    and is reported, not rejected.
    """
    errs: list[str] = []
    n = g.n_nodes

    def name(v: int) -> str:
        return g.node_labels[v] if 0 <= v < n else f"#{v}"

    if not d.stems:
        errs.append("decomposition declares no stems")

    # cactus_of[v] = index of the cactus currently containing node v
    cactus_of: dict[int, int] = {}
    for ci, stem in enumerate(d.stems):
        if not stem:
            errs.append(f"stem {ci} is empty")
            continue
        if len(set(stem)) != len(stem):
            errs.append(f"stem {ci} repeats a node")
        for v in stem:
            if not (0 <= v < n):
                errs.append(f"stem {ci} references unknown node {v}")
            elif v in cactus_of:
                errs.append(f"node {name(v)} assigned to two cacti")
            else:
                cactus_of[v] = ci
        for u, v in zip(stem, stem[1:]):
            if 0 <= u < n and 0 <= v < n and not g.has_edge(u, v):
                errs.append(f"stem edge {name(u)} -> {name(v)} missing from graph")

    for bi, bud in enumerate(d.buds):
        cyc = bud.cycle
        if len(cyc) < 2:
            errs.append(f"bud {bi} cycle needs at least two nodes")
            continue
        if len(set(cyc)) != len(cyc):
            errs.append(f"bud {bi} cycle repeats a node")
            continue
        bad = False
        for v in cyc:
            if not (0 <= v < n):
                errs.append(f"bud {bi} references unknown node {v}")
                bad = True
        if bad:
            continue
        cycle_edges = list(zip(cyc, cyc[1:])) + [(cyc[-1], cyc[0])]
        for u, v in cycle_edges:
            if not g.has_edge(u, v):
                errs.append(f"bud {bi} cycle edge {name(u)} -> {name(v)} missing")
        a, b = bud.edge
        if a != bud.dangling or b not in cyc:
            errs.append(
                f"bud {bi} distinguished edge must run from the dangling node "
                f"into the cycle"
            )
        elif not g.has_edge(a, b):
            errs.append(f"bud {bi} distinguished edge {name(a)} -> {name(b)} missing")
        if bud.dangling not in cactus_of:
            errs.append(
                f"bud {bi} dangling node {name(bud.dangling)} is not part of "
                f"any earlier stem or bud"
            )
            continue
        ci = cactus_of[bud.dangling]
        for v in cyc:
            if v in cactus_of:
                errs.append(
                    f"bud {bi} cycle node {name(v)} already belongs to a cactus"
                )
            else:
                cactus_of[v] = ci

    missing = sorted(set(range(n)) - set(cactus_of))
    for v in missing:
        errs.append(f"node {name(v)} not spanned")

    inputs = set(g.input_nodes)
    for stem in d.stems:
        if stem and 0 <= stem[0] < n and stem[0] not in inputs:
            errs.append(f"root {name(stem[0])} is not an input node")

    for u, v in d.cross_links:
        if not (0 <= u < n and 0 <= v < n) or not g.has_edge(u, v):
            errs.append(f"declared cross link {u} -> {v} is not an edge")

    skeleton = d.skeleton_edges()
    extras = tuple(
        sorted((e.src, e.dst) for e in g.edges if (e.src, e.dst) not in skeleton)
    )
    return CactusVerdict(not errs, tuple(errs), extras)


# ---------------------------------------------------------------------------
# dropout
# ---------------------------------------------------------------------------


def drop_elements(g: SignedDigraph, nodes=(), edges=()) -> SignedDigraph:
    """Subgraph after removing the given nodes and edges.

    Dropped nodes take their incident edges with them; surviving nodes keep
    their labels, input gains and output designation.  Asking to drop a
    node or edge that does not exist raises GraphError.
    """
    node_set = {int(v) for v in nodes}
    for v in node_set:
        if not (0 <= v < g.n_nodes):
            raise GraphError(f"cannot drop unknown node {v}")
    edge_set = {(int(u), int(v)) for u, v in edges}
    existing = {(e.src, e.dst) for e in g.edges}
    for ed in edge_set:
        if ed not in existing:
            raise GraphError(f"cannot drop unknown edge {ed[0]} -> {ed[1]}")

    keep = [v for v in range(g.n_nodes) if v not in node_set]
    remap = {old: new for new, old in enumerate(keep)}
    new_edges = tuple(
        Edge(remap[e.src], remap[e.dst], e.sign, e.weight)
        for e in g.edges
        if e.src in remap and e.dst in remap and (e.src, e.dst) not in edge_set
    )
    new_gains = tuple((remap[k], b) for k, b in g.input_gains if k in remap)
    new_outputs = tuple(remap[o] for o in g.output_nodes if o in remap)
    return SignedDigraph(
        tuple(g.node_labels[v] for v in keep),
        new_edges,
        g.bounds,
        new_gains,
        new_outputs,
    )


def drop_impact_flags(
    g: SignedDigraph, d: CactusDecomposition, nodes=(), edges=()
) -> list[str]:
    """Warnings about how a drop request interacts with a declared decomposition.

    Flags (never errors): removal of a root that is the sole root, removal
    of any skeleton node or edge.  An empty request yields no flags.
    """
    flags: list[str] = []
    node_set = {int(v) for v in nodes}
    edge_set = {(int(u), int(v)) for u, v in edges}
    roots = set(d.roots)
    for v in sorted(node_set & roots):
        flags.append(f"dropping root {g.node_labels[v]} of its cactus")
    for ci, stem in enumerate(d.stems):
        for v in stem:
            if v in node_set and v not in roots:
                flags.append(f"dropping stem node {g.node_labels[v]} (stem {ci})")
    for bi, bud in enumerate(d.buds):
        for v in bud.cycle:
            if v in node_set:
                flags.append(
                    f"dropping bud cycle node {g.node_labels[v]} breaks bud {bi}"
                )
    skel = d.skeleton_edges()
    incident = {
        (e.src, e.dst) for e in g.edges if e.src in node_set or e.dst in node_set
    }
    for u, v in sorted((edge_set | incident) & skel):
        flags.append(
            f"dropping skeleton edge {g.node_labels[u]} -> {g.node_labels[v]}"
        )
    return flags


# ---------------------------------------------------------------------------
# cascade composition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CascadePart:
    """One cactus subgraph (or a pure cycle) to be wired into a cascade.

    A stem part declares its backbone path and buds; its root is the stem
    head and its extremity the stem tail.  A pure-cycle part declares only
    the cycle; when linked it becomes a bud of the upstream cactus.
    """

    graph: SignedDigraph
    stem: tuple[int, ...] = ()
    buds: tuple[Bud, ...] = ()
    cycle: tuple[int, ...] = ()

    def __post_init__(self):
        if bool(self.stem) == bool(self.cycle):
            raise GraphError("a cascade part declares either a stem or a cycle")

    @property
    def is_cycle(self) -> bool:
        return bool(self.cycle)

    @property
    def root(self) -> int:
        return self.cycle[0] if self.is_cycle else self.stem[0]

    @property
    def extremity(self) -> int | None:
        return None if self.is_cycle else self.stem[-1]


@dataclass(frozen=True)
class CascadeLink:
    """Directed connection from the extremity of part `src` to the root of
    part `dst`."""

    src: int
    dst: int
    sign: str = "+"
    weight: float = 0.5


def _validate_part(part: CascadePart, idx: int) -> None:
    g = part.graph
    if part.is_cycle:
        cyc = part.cycle
        if len(cyc) < 2 or len(set(cyc)) != len(cyc):
            raise GraphError(f"part {idx}: invalid cycle declaration")
        for u, v in list(zip(cyc, cyc[1:])) + [(cyc[-1], cyc[0])]:
            if not g.has_edge(u, v):
                raise GraphError(f"part {idx}: cycle edge {u} -> {v} missing")
        if set(cyc) != set(range(g.n_nodes)):
            raise GraphError(f"part {idx}: cycle must span the whole part")
        return
    # a stem part must validate as a cactus on its own once the root has an
    # input attached (the link will supply one if the declared inputs do not)
    probe = g
    if part.root not in g.input_nodes:
        probe = SignedDigraph(
            g.node_labels,
            g.edges,
            g.bounds,
            tuple(sorted(set(g.input_gains) | {(part.root, 1.0)})),
            g.output_nodes,
        )
    verdict = validate_generalized_cactus(
        probe, CactusDecomposition((part.stem,), part.buds)
    )
    if not verdict:
        raise GraphError(
            f"part {idx} is not a valid cactus: " + "; ".join(verdict.violations)
        )


def compose_cascade(
    parts: list[CascadePart] | tuple[CascadePart, ...],
    links: list[CascadeLink] | tuple[CascadeLink, ...] = (),
) -> tuple[SignedDigraph, CactusDecomposition]:
    """Merge cactus subgraphs into one graph by extremity-to-root links.

    Every linked root loses its external-input status; every root must end
    up either linked or externally driven.  An extremity may feed at most
    one stem part but any number of pure-cycle parts (a linked cycle turns
    into a bud dangling from that extremity).  The returned decomposition
    records the stitched stems and buds so it validates on the merged
    graph.
    """
    if not parts:
        raise GraphError("no parts to compose")
    for i, part in enumerate(parts):
        _validate_part(part, i)
    b0 = parts[0].graph.bounds
    for i, part in enumerate(parts[1:], 1):
        if part.graph.bounds != b0:
            raise GraphError(f"part {i} uses different weight bounds")

    n_parts = len(parts)
    stem_link_out: dict[int, int] = {}  # src part -> link idx (stem targets)
    in_link: dict[int, int] = {}  # dst part -> link idx
    for li, link in enumerate(links):
        if not (0 <= link.src < n_parts and 0 <= link.dst < n_parts):
            raise GraphError(f"link {li} references unknown part")
        if parts[link.src].is_cycle:
            raise GraphError(f"link {li}: pure-cycle part {link.src} has no extremity")
        if link.dst in in_link:
            raise GraphError(f"part {link.dst} root receives two links")
        in_link[link.dst] = li
        if not parts[link.dst].is_cycle:
            if link.src in stem_link_out:
                raise GraphError(
                    f"extremity of part {link.src} links to two non-cycle roots"
                )
            stem_link_out[link.src] = li

    for pi, part in enumerate(parts):
        root_driven = part.root in part.graph.input_nodes
        if pi not in in_link and not root_driven:
            raise GraphError(f"part {pi} root has neither a link nor an input")

    # relabel: prefix part labels only when they collide
    all_labels = [lab for p in parts for lab in p.graph.node_labels]
    collide = len(set(all_labels)) != len(all_labels)
    offsets: list[int] = []
    labels: list[str] = []
    for pi, part in enumerate(parts):
        offsets.append(len(labels))
        for lab in part.graph.node_labels:
            labels.append(f"p{pi}.{lab}" if collide else lab)

    edges: list[Edge] = []
    gains: list[tuple[int, float]] = []
    outputs: list[int] = []
    for pi, part in enumerate(parts):
        off = offsets[pi]
        for e in part.graph.edges:
            edges.append(Edge(e.src + off, e.dst + off, e.sign, e.weight))
        linked = pi in in_link
        for k, b in part.graph.input_gains:
            if linked and k == part.root:
                continue  # the link replaces the external drive
            gains.append((k + off, b))
        outputs.extend(o + off for o in part.graph.output_nodes)
    for link in links:
        u = offsets[link.src] + parts[link.src].extremity
        v = offsets[link.dst] + parts[link.dst].root
        edges.append(Edge(u, v, link.sign, link.weight))

    merged = SignedDigraph(
        tuple(labels), tuple(edges), b0, tuple(sorted(gains)), tuple(sorted(outputs))
    )

    # stitch stems: follow chains of stem links starting at unlinked stem parts
    stems: list[tuple[int, ...]] = []
    buds: list[Bud] = []
    for pi, part in enumerate(parts):
        if part.is_cycle:
            li = in_link.get(pi)
            if li is None:
                raise GraphError(f"pure-cycle part {pi} must be linked")
            link = links[li]
            dang = offsets[link.src] + parts[link.src].extremity
            cyc = tuple(v + offsets[pi] for v in part.cycle)
            buds.append(Bud(cyc, dang, (dang, cyc[0])))
            continue
        for bud in part.buds:
            off = offsets[pi]
            buds.append(
                Bud(
                    tuple(v + off for v in bud.cycle),
                    bud.dangling + off,
                    (bud.edge[0] + off, bud.edge[1] + off),
                )
            )
        if pi in in_link:
            continue  # absorbed into the upstream stem chain
        chain = [v + offsets[pi] for v in part.stem]
        cur = pi
        while cur in stem_link_out:
            nxt = links[stem_link_out[cur]].dst
            chain.extend(v + offsets[nxt] for v in parts[nxt].stem)
            cur = nxt
        stems.append(tuple(chain))

    decomposition = CactusDecomposition(tuple(stems), tuple(buds))
    return merged, decomposition


# ---------------------------------------------------------------------------
# node-disjoint paths
# ---------------------------------------------------------------------------


def find_disjoint_input_paths(g: SignedDigraph, targets) -> list[list[int]] | None:
    """Node-disjoint paths from distinct input nodes to the given targets.

    Returns one path per target (pairwise node-disjoint, each starting at a
    different input node) or None when no such family exists.  Implemented
    as max-flow with unit node capacities; augmenting searches visit
    neighbours in ascending node order so the result is deterministic.
    """
    if not g.input_gains:
        raise GraphError("graph has no input nodes")
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise GraphError("duplicate target nodes")
    r = len(targets)
    if r == 0:
        return []

    # split each node v into v_in = 2v and v_out = 2v+1 with capacity-1 arc
    n = g.n_nodes
    SRC, SNK = 2 * n, 2 * n + 1
    cap: dict[tuple[int, int], int] = {}

    def add(u, v):
        cap[(u, v)] = cap.get((u, v), 0) + 1
        cap.setdefault((v, u), 0)

    for v in range(n):
        add(2 * v, 2 * v + 1)
    for e in g.edges:
        add(2 * e.src + 1, 2 * e.dst)
    for k in g.input_nodes:
        add(SRC, 2 * k)
    for t in targets:
        add(2 * t + 1, SNK)

    adj: dict[int, list[int]] = {}
    for (u, v) in cap:
        adj.setdefault(u, []).append(v)
    for u in adj:
        adj[u].sort()

    flow = 0
    while flow < r:
        # BFS for a shortest augmenting path, lowest node index first
        parent: dict[int, int] = {SRC: SRC}
        queue = deque([SRC])
        while queue and SNK not in parent:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in parent and cap[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if SNK not in parent:
            return None
        v = SNK
        while v != SRC:
            u = parent[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        flow += 1

    # walk the flow decomposition from each saturated source arc; node
    # capacity 1 means every node has at most one used outgoing edge arc
    used_out: dict[int, int] = {}
    for e in g.edges:
        if cap[(2 * e.src + 1, 2 * e.dst)] == 0:
            used_out[e.src] = e.dst
    paths: list[list[int]] = []
    for k in sorted(g.input_nodes):
        if cap[(SRC, 2 * k)] != 0:
            continue
        path = [k]
        while True:
            last = path[-1]
            snk_arc = (2 * last + 1, SNK)
            if snk_arc in cap and cap[snk_arc] == 0:
                break
            nxt = used_out.get(last)
            if nxt is None:
                return None
            path.append(nxt)
        paths.append(path)
    if len(paths) != r or {p[-1] for p in paths} != set(targets):
        return None
    by_target = {p[-1]: p for p in paths}
    return [by_target[t] for t in targets]


# ---------------------------------------------------------------------------
# random structures (for property sweeps)
# ---------------------------------------------------------------------------


def random_cactus(
    rng: np.random.Generator,
    n_nodes: int,
    bounds: WeightBounds | None = None,
    label_prefix: str = "n",
) -> tuple[SignedDigraph, CactusDecomposition]:
    """Random single-rooted cactus on n_nodes nodes with in-bound weights.

    The stem length and bud sizes are drawn at random; the root is the sole
    input node.  Useful for randomized structural-property sweeps.
    """
    if n_nodes < 1:
        raise GraphError("need at least one node")
    if bounds is None:
        bounds = WeightBounds(0.1, 1.2, -1.2, -0.1)

    def w_pos():
        return float(rng.uniform(bounds.pos_min, bounds.pos_max))

    stem_len = int(rng.integers(1, n_nodes + 1))
    # leftover nodes go into buds of size >= 2; fold a remainder of 1 into the stem
    rest = n_nodes - stem_len
    if rest == 1:
        stem_len += 1
        rest = 0
    stem = tuple(range(stem_len))
    edges = [(u, u + 1, "+", w_pos()) for u in range(stem_len - 1)]
    buds = []
    nxt = stem_len
    while rest >= 2:
        size = int(rng.integers(2, min(rest, 4) + 1))
        if rest - size == 1:
            size += 1
        cyc = tuple(range(nxt, nxt + size))
        for u, v in list(zip(cyc, cyc[1:])) + [(cyc[-1], cyc[0])]:
            edges.append((u, v, "+", w_pos()))
        dangling = int(rng.integers(0, stem_len))
        edges.append((dangling, cyc[0], "+", w_pos()))
        buds.append(Bud(cyc, dangling, (dangling, cyc[0])))
        nxt += size
        rest -= size
    labels = [f"{label_prefix}{i}" for i in range(n_nodes)]
    g = build_graph(labels, [(labels[u], labels[v], s, w) for u, v, s, w in edges],
                    inputs=[(labels[0], 1.0)], outputs=[labels[stem_len - 1]],
                    bounds=bounds)
    return g, CactusDecomposition((stem,), tuple(buds))
