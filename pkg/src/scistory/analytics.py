"""Graph analytics over entity mentions: co-occurrence networks, Newman
modularity, a deterministic two-phase Louvain, frequency ranking, and the
temporal evolution data for collections."""

from dataclasses import dataclass, field

from scistory.errors import MetadataError, ParameterError, UndefinedModularityError
from scistory.entities import EntityMention, EntityTable

SENTENCE = "sentence"
PARAGRAPH = "paragraph"
LEVELS = (SENTENCE, PARAGRAPH)


@dataclass
class CoocGraph:
    level: str
    nodes: dict[str, int] = field(default_factory=dict)  # entity_id -> mention frequency
    edges: dict[tuple[str, str], int] = field(default_factory=dict)  # sorted pair -> weight

    def weight(self, a: str, b: str) -> int:
        return self.edges.get((min(a, b), max(a, b)), 0)

    def neighbors(self, node: str):
        for (a, b), w in self.edges.items():
            if a == node:
                yield b, w
            elif b == node:
                yield a, w


Partition = dict[str, int]


@dataclass(frozen=True)
class EvolutionNode:
    entity_id: str
    canonical: str
    origin_doc_id: str
    origin_date: str
    x_rank: int


@dataclass
class EvolutionData:
    nodes: list[EvolutionNode]
    arcs: dict[tuple[str, str], int]


def cooccurrence(docs, level: str = SENTENCE) -> CoocGraph:
    """Count scenes (sentences or paragraphs) where two entities both appear.

    Multiple mentions of a pair inside one scene count once. ``docs`` is an
    iterable of (mentions, ...) sources; each item must expose ``mentions``
    as a list of EntityMention, or be such a list itself.
    """
    if level not in LEVELS:
        raise ParameterError(f"unknown co-occurrence level {level!r}")
    graph = CoocGraph(level=level)
    for doc in docs:
        mentions = doc if isinstance(doc, list) else doc.mentions
        scenes: dict[int, set[str]] = {}
        for m in mentions:
            key = m.sentence_index if level == SENTENCE else m.paragraph_index
            scenes.setdefault(key, set()).add(m.entity_id)
            graph.nodes[m.entity_id] = graph.nodes.get(m.entity_id, 0) + 1
        for members in scenes.values():
            ordered = sorted(members)
            for i, a in enumerate(ordered):
                for b in ordered[i + 1:]:
                    graph.edges[(a, b)] = graph.edges.get((a, b), 0) + 1
    return graph


# --- modularity and Louvain -----------------------------------------------------

def _adjacency(graph: CoocGraph) -> dict[str, dict[str, float]]:
    adj: dict[str, dict[str, float]] = {n: {} for n in graph.nodes}
    for (a, b), w in graph.edges.items():
        adj.setdefault(a, {})[b] = adj.setdefault(a, {}).get(b, 0) + w
        adj.setdefault(b, {})[a] = adj.setdefault(b, {}).get(a, 0) + w
    return adj


def modularity(graph: CoocGraph, partition: Partition) -> float:
    """Newman weighted modularity Q over the co-occurrence graph."""
    missing = [n for n in graph.nodes if n not in partition]
    if missing:
        raise ParameterError(f"partition does not cover nodes: {missing[:5]}")
    two_m = 2.0 * sum(graph.edges.values())
    if two_m == 0:
        raise UndefinedModularityError("graph has no edge weight")
    adj = _adjacency(graph)
    degree = {n: sum(adj[n].values()) for n in graph.nodes}
    q = 0.0
    for (a, b), w in graph.edges.items():
        if partition[a] == partition[b]:
            q += 2.0 * w / two_m  # both ordered pairs (a,b) and (b,a)
    community_degree: dict[int, float] = {}
    for n in graph.nodes:
        community_degree[partition[n]] = community_degree.get(partition[n], 0.0) + degree[n]
    for total in community_degree.values():
        q -= (total / two_m) ** 2
    return q


def louvain(graph: CoocGraph) -> Partition:
    """Two-phase Louvain over a fixed family of sweep orders.

    Greedy single-node moves from a sorted sweep can stall in a local
    optimum on small graphs, so the local-move phase is restarted from a
    deterministic set of initial orders (sorted, reversed, and rotations)
    and the partition with the highest modularity wins. Output is therefore
    deterministic. Isolated nodes end up as singleton communities.
    """
    if not graph.nodes:
        raise ParameterError("cannot partition an empty graph")
    base = sorted(graph.nodes)
    if not graph.edges:
        return {n: i for i, n in enumerate(base)}

    reverse = list(reversed(base))
    orders = [base[k:] + base[:k] for k in range(len(base))]
    orders += [reverse[k:] + reverse[:k] for k in range(len(base))]

    best_partition: Partition | None = None
    best_q = float("-inf")
    for order in orders:
        candidate = _refine(graph, _louvain_run(graph, order))
        q = modularity(graph, candidate)
        if q > best_q + 1e-12:
            best_q, best_partition = q, candidate
    if best_q < 0.0:
        # the one-community partition always scores exactly zero
        best_partition = {n: 0 for n in base}
    dense: dict[int, int] = {}
    out: Partition = {}
    for n in base:
        label = best_partition[n]
        if label not in dense:
            dense[label] = len(dense)
        out[n] = dense[label]
    return out


def _refine(graph: CoocGraph, partition: Partition) -> Partition:
    """Polish a partition: seeded node-level moves and community merges.

    The aggregation step of Louvain can lock nodes inside a supernode; a
    flat pass at entity level plus greedy pairwise community merges escapes
    those local optima. Deterministic: nodes in sorted order, best merge
    first with lowest-id tie-breaks.
    """
    nodes = sorted(graph.nodes)
    adj = _adjacency(graph)
    degree = {n: sum(adj[n].values()) for n in nodes}
    m = float(sum(graph.edges.values()))
    community = dict(partition)
    comm_total: dict[int, float] = {}
    for n in nodes:
        comm_total[community[n]] = comm_total.get(community[n], 0.0) + degree[n]

    changed = True
    while changed:
        changed = False
        # seeded single-node moves until fixpoint
        while True:
            moved = False
            for n in nodes:
                current = community[n]
                comm_total[current] -= degree[n]
                weight_to: dict[int, float] = {}
                for t, w in adj[n].items():
                    weight_to[community[t]] = weight_to.get(community[t], 0.0) + w

                def gain(c):
                    return (weight_to.get(c, 0.0) / m
                            - comm_total.get(c, 0.0) * degree[n] / (2.0 * m * m))

                candidates = sorted(set(weight_to) | {current})
                best_gain = max(gain(c) for c in candidates)
                best_set = [c for c in candidates if gain(c) >= best_gain - 1e-12]
                best = current if current in best_set else best_set[0]
                community[n] = best
                comm_total[best] = comm_total.get(best, 0.0) + degree[n]
                if best != current:
                    moved = changed = True
            if not moved:
                break
        # greedy community merges while any raises Q
        while True:
            between: dict[tuple[int, int], float] = {}
            for (a, b), w in graph.edges.items():
                ca, cb = community[a], community[b]
                if ca != cb:
                    key = (min(ca, cb), max(ca, cb))
                    between[key] = between.get(key, 0.0) + w
            best_delta, best_pair = 1e-12, None
            for pair in sorted(between):
                c1, c2 = pair
                delta = (between[pair] / m
                         - comm_total.get(c1, 0.0) * comm_total.get(c2, 0.0) / (2.0 * m * m))
                if delta > best_delta + 1e-12:
                    best_delta, best_pair = delta, pair
            if best_pair is None:
                break
            c1, c2 = best_pair
            for n in nodes:
                if community[n] == c2:
                    community[n] = c1
            comm_total[c1] = comm_total.get(c1, 0.0) + comm_total.pop(c2, 0.0)
            changed = True
        # joint two-node moves: escapes optima that need a coordinated step;
        # exhaustive, so only worth it on small graphs
        if len(nodes) <= _PAIR_MOVE_LIMIT and _apply_best_pair_move(graph, community):
            changed = True
            comm_total = {}
            for n in nodes:
                comm_total[community[n]] = comm_total.get(community[n], 0.0) + degree[n]
    return community


_PAIR_MOVE_LIMIT = 12


def _apply_best_pair_move(graph: CoocGraph, community: Partition) -> bool:
    """Apply the best-improving coordinated two-node move, if any.

    Each node of the pair may go to a different target community (that is
    what escapes the optima single moves and merges cannot leave). Targets
    include one fresh community. Exhaustive, hence the small-graph limit.
    """
    nodes = sorted(graph.nodes)
    base_q = modularity(graph, community)
    fresh = max(community.values(), default=-1) + 1
    targets = sorted(set(community.values())) + [fresh]
    best = None
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            for cu in targets:
                for cv in targets:
                    if cu == community[u] and cv == community[v]:
                        continue
                    trial = dict(community)
                    trial[u], trial[v] = cu, cv
                    delta = modularity(graph, trial) - base_q
                    if delta > 1e-9 and (best is None or delta > best[0] + 1e-12):
                        best = (delta, u, v, cu, cv)
    if best is None:
        return False
    _, u, v, cu, cv = best
    community[u], community[v] = cu, cv
    return True


def _louvain_run(graph: CoocGraph, initial_order: list[str]) -> Partition:
    nodes = list(initial_order)
    # adjacency with explicit self-loop weights (appear during aggregation);
    # degrees count self-loops twice, per the usual convention
    adj: dict[str, dict[str, float]] = {n: {} for n in nodes}
    for (a, b), w in graph.edges.items():
        adj[a][b] = adj[a].get(b, 0.0) + w
        adj[b][a] = adj[b].get(a, 0.0) + w
    self_loops: dict[str, float] = {n: 0.0 for n in nodes}
    m = float(sum(graph.edges.values()))
    if m == 0:
        return {n: i for i, n in enumerate(nodes)}

    membership = {n: n for n in nodes}  # community labels at the current level
    level_order = list(nodes)  # sweep order; custom at level 0, sorted afterwards

    def one_level(level_nodes, adj_, loops_):
        community = {n: i for i, n in enumerate(level_nodes)}  # singletons
        degree = {
            n: sum(w for t, w in adj_[n].items() if t != n) + 2.0 * loops_[n]
            for n in level_nodes
        }
        comm_total = {community[n]: degree[n] for n in level_nodes}
        improved = False
        while True:
            moved = False
            for n in level_nodes:
                current = community[n]
                comm_total[current] -= degree[n]
                weight_to: dict[int, float] = {}
                for t, w in adj_[n].items():
                    if t != n:
                        weight_to[community[t]] = weight_to.get(community[t], 0.0) + w

                def gain(c):
                    return (weight_to.get(c, 0.0) / m
                            - comm_total.get(c, 0.0) * degree[n] / (2.0 * m * m))

                candidates = sorted(set(weight_to) | {current})
                best_gain = max(gain(c) for c in candidates)
                best_set = [c for c in candidates if gain(c) >= best_gain - 1e-12]
                best = current if current in best_set else best_set[0]
                community[n] = best
                comm_total[best] = comm_total.get(best, 0.0) + degree[n]
                if best != current:
                    moved = improved = True
            if not moved:
                break
        return community, improved

    while True:
        community, improved = one_level(level_order, adj, self_loops)
        if not improved:
            break
        # relabel document entities through the new level
        membership = {n: community[membership[n]] for n in membership}
        # aggregate the graph: communities become nodes
        new_nodes = sorted(set(community.values()))
        new_adj: dict[int, dict[int, float]] = {n: {} for n in new_nodes}
        new_loops: dict[int, float] = {n: 0.0 for n in new_nodes}
        for n in level_order:
            cn = community[n]
            new_loops[cn] += self_loops[n]
            for t, w in adj[n].items():
                ct = community[t]
                if t == n:
                    continue
                if cn == ct:
                    new_loops[cn] += w / 2.0
                else:
                    new_adj[cn][ct] = new_adj[cn].get(ct, 0.0) + w
        adj, self_loops = new_adj, new_loops
        level_order = new_nodes

    # dense ids in order of first appearance over sorted entity ids
    dense: dict[int, int] = {}
    partition: Partition = {}
    for n in sorted(nodes):
        label = membership[n]
        if label not in dense:
            dense[label] = len(dense)
        partition[n] = dense[label]
    return partition


def frequency_ranking(table: EntityTable, top_k: int | None = None) -> list:
    """Table rows are already ordered (count desc, first occurrence asc)."""
    rows = list(table.rows)
    if top_k is not None:
        rows = rows[:top_k]
    return rows


def evolution(collection) -> EvolutionData:
    """Entity origins and cross-document sentence-level co-occurrence arcs.

    ``collection`` is an iterable of records exposing doc_id, pub_date,
    mentions, and a gazetteer canonical lookup via ``canonical(entity_id)``.
    """
    records = list(collection)
    for record in records:
        if not record.pub_date:
            raise MetadataError(f"document {record.doc_id!r} has no pub_date")

    origin: dict[str, tuple[str, str, str]] = {}  # entity -> (date, doc_id, canonical)
    for record in sorted(records, key=lambda r: (r.pub_date, r.doc_id)):
        for m in record.mentions:
            if m.entity_id not in origin:
                origin[m.entity_id] = (record.pub_date, record.doc_id,
                                       record.canonical(m.entity_id))

    ordered = sorted(origin.items(), key=lambda kv: (kv[1][0], kv[1][1], kv[1][2]))
    nodes = [
        EvolutionNode(entity_id=eid, canonical=canonical, origin_doc_id=doc_id,
                      origin_date=date, x_rank=rank)
        for rank, (eid, (date, doc_id, canonical)) in enumerate(ordered)
    ]
    merged = cooccurrence([r.mentions for r in records], SENTENCE)
    return EvolutionData(nodes=nodes, arcs=dict(merged.edges))
