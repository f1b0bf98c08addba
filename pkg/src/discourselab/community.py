"""Repost graphs, modularity-based community detection, ensemble consensus,
cross-window community matching, and seed-based timeline labeling.

Community detection is the classic two-phase greedy modularity optimization:
local moves over a seeded node order, then graph aggregation, repeated until
the modularity gain drops below 1e-9. The ensemble variant runs it N times
with derived seeds and keeps only node pairs co-assigned in at least n runs;
connected components of that agreement graph are the reported communities and
everything else is left unassigned.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .corpus import AnalysisWindow, Corpus

GAIN_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class RepostGraph:
    """Undirected weighted graph; weight = repost count in either direction."""

    adj: dict[str, dict[str, float]]
    window: AnalysisWindow | None = None

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.adj))

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adj.values()) // 2

    def total_weight(self) -> float:
        return sum(w for nbrs in self.adj.values() for w in nbrs.values()) / 2.0


@dataclass(frozen=True)
class EnsembleConfig:
    runs: int = 100
    agree: int = 90
    base_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.agree <= self.runs:
            raise ValueError("need 1 <= agree <= runs")


@dataclass(frozen=True)
class CommunitySnapshot:
    window_index: int
    communities: tuple[tuple[str, ...], ...]  # disjoint, each sorted
    unassigned: tuple[str, ...]


@dataclass(frozen=True)
class EvolutionEvent:
    from_window: int
    to_window: int
    kind: str  # birth, death, grow, shrink, merge, split, partial
    predecessors: tuple[int, ...]
    successors: tuple[int, ...]
    overlaps: tuple[tuple[int, int, float, float], ...]  # (pred, succ, forward, backward)


@dataclass(frozen=True)
class CommunityTimeline:
    label: str
    communities_by_window: dict[int, tuple[int, ...]]
    members_by_window: dict[int, frozenset[str]]


def build_repost_graph(corpus: Corpus, window: AnalysisWindow | None = None) -> RepostGraph:
    """Aggregate the window's reposts into an undirected weighted graph."""
    adj: dict[str, dict[str, float]] = {}
    for rep in corpus.reposts:
        if window is not None and not window.contains(rep.timestamp):
            continue
        u, v = rep.reposter_id, rep.original_author_id
        if u == v:
            continue
        row_u = adj.setdefault(u, {})
        row_u[v] = row_u.get(v, 0.0) + 1.0
        row_v = adj.setdefault(v, {})
        row_v[u] = row_v.get(u, 0.0) + 1.0
    return RepostGraph(adj=adj, window=window)


def modularity(graph: RepostGraph, partition: dict[str, int]) -> float:
    """Standard weighted modularity of a node partition."""
    m2 = 0.0
    for nbrs in graph.adj.values():
        m2 += sum(nbrs.values())
    if m2 == 0:
        raise ValueError("graph has no edges")
    intra = 0.0
    deg_by_com: dict[int, float] = defaultdict(float)
    for u, nbrs in graph.adj.items():
        deg = sum(nbrs.values())
        deg_by_com[partition[u]] += deg
        for v, w in nbrs.items():
            if partition[u] == partition[v]:
                intra += w
    q = intra / m2
    for deg in deg_by_com.values():
        q -= (deg / m2) ** 2
    return q


def _degrees(adj: dict) -> dict:
    # self-loops (present on aggregated graphs) count twice
    return {u: sum(w for v, w in nbrs.items() if v != u) + 2.0 * nbrs.get(u, 0.0)
            for u, nbrs in adj.items()}


def _one_level(adj: dict, rng: random.Random) -> tuple[dict, bool]:
    """Greedy local moves until no node improves modularity."""
    nodes = sorted(adj)
    deg = _degrees(adj)
    m2 = sum(deg.values())
    node2com = {u: i for i, u in enumerate(nodes)}
    com_tot = {i: deg[u] for i, u in enumerate(nodes)}
    margin = GAIN_EPS * m2 / 2.0
    moved_any = False
    while True:
        moves = 0
        order = nodes[:]
        rng.shuffle(order)
        for u in order:
            cu = node2com[u]
            links: dict[int, float] = defaultdict(float)
            for v, w in adj[u].items():
                if v != u:
                    links[node2com[v]] += w
            com_tot[cu] -= deg[u]
            best_c = cu
            best_gain = links.get(cu, 0.0) - com_tot[cu] * deg[u] / m2
            for c in sorted(links):
                if c == cu:
                    continue
                gain = links[c] - com_tot[c] * deg[u] / m2
                if gain > best_gain + margin:
                    best_c, best_gain = c, gain
            node2com[u] = best_c
            com_tot[best_c] += deg[u]
            if best_c != cu:
                moves += 1
                moved_any = True
        if moves == 0:
            break
    return node2com, moved_any


def _aggregate(adj: dict, node2com: dict) -> dict:
    new_adj: dict[int, dict[int, float]] = defaultdict(lambda: defaultdict(float))
    for u, nbrs in adj.items():
        cu = node2com[u]
        for v, w in nbrs.items():
            cv = node2com[v]
            if u == v:
                new_adj[cu][cu] += w
            elif cu == cv:
                # each undirected intra edge shows up from both endpoints;
                # keep half so the self-loop holds the plain edge weight
                new_adj[cu][cu] += w / 2.0
            else:
                new_adj[cu][cv] += w
    return {u: dict(nbrs) for u, nbrs in new_adj.items()}


def louvain(graph: RepostGraph, seed: int) -> dict[str, int]:
    """Greedy modularity partition with a seeded node visit order.

    Returns node -> community id; ids are renumbered 0..k-1 ordered by each
    community's smallest member, so identical partitions compare equal.
    """
    if not graph.adj:
        raise ValueError("empty graph")
    rng = random.Random(seed)
    adj: dict = {u: dict(nbrs) for u, nbrs in graph.adj.items()}
    assignment = {u: u for u in graph.adj}
    q_prev = None
    while True:
        node2com, moved = _one_level(adj, rng)
        assignment = {orig: node2com[cur] for orig, cur in assignment.items()}
        q_now = modularity(graph, assignment)
        if not moved or (q_prev is not None and q_now - q_prev <= GAIN_EPS):
            break
        q_prev = q_now
        adj = _aggregate(adj, node2com)
    groups: dict[int, list[str]] = defaultdict(list)
    for node, com in assignment.items():
        groups[com].append(node)
    ordered = sorted(groups.values(), key=min)
    return {node: cid for cid, members in enumerate(ordered) for node in members}


def consensus_communities(partitions: list[dict[str, int]], nodes: list[str],
                          min_agree: int) -> tuple[list[tuple[str, ...]], list[str]]:
    """Co-clustering consensus: link node pairs co-assigned in >= min_agree
    partitions, return the connected components of size >= 2 plus the
    leftover singletons."""
    n = len(nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    agree = np.zeros((n, n), dtype=np.int32)
    for part in partitions:
        labels = np.fromiter((part[u] for u in nodes), dtype=np.int64, count=n)
        agree += labels[:, None] == labels[None, :]
    linked = agree >= min_agree
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    rows, cols = np.nonzero(np.triu(linked, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[str]] = defaultdict(list)
    for i in range(n):
        comps[find(i)].append(nodes[i])
    communities = [tuple(sorted(c)) for c in comps.values() if len(c) >= 2]
    communities.sort(key=lambda c: (-len(c), c[0]))
    unassigned = sorted(c[0] for c in comps.values() if len(c) == 1)
    return communities, unassigned


def ensemble_louvain(graph: RepostGraph, config: EnsembleConfig) -> CommunitySnapshot:
    """Run the detector ``runs`` times with derived seeds and keep the node
    groupings that agree at least ``agree`` times."""
    if not graph.adj:
        raise ValueError("empty graph")
    nodes = sorted(graph.adj)
    partitions = [louvain(graph, config.base_seed + r) for r in range(config.runs)]
    communities, unassigned = consensus_communities(partitions, nodes, config.agree)
    window_index = graph.window.index if graph.window is not None else -1
    return CommunitySnapshot(window_index=window_index,
                             communities=tuple(communities),
                             unassigned=tuple(unassigned))


def match_communities(prev: CommunitySnapshot, curr: CommunitySnapshot,
                      threshold: float = 0.5) -> list[EvolutionEvent]:
    """Classify how communities evolved between two adjacent snapshots.

    With overlap fractions f = |P & C| / |P| (forward) and b = |P & C| / |C|
    (backward), and contribution bar threshold/2:

      * no overlap at all          -> birth (new side) / death (old side)
      * >= 2 predecessors with b >= threshold/2 into one successor -> merge
      * one predecessor with f >= threshold/2 into >= 2 successors -> split
      * a pair with f >= threshold and b >= threshold -> grow/shrink
      * anything left with some overlap -> partial

    Rules consume communities in that order, so the paper-style 50/50 case is
    a merge even though each half also continues strongly. Unassigned nodes
    are excluded from all fractions.
    """
    prev_sets = [frozenset(c) for c in prev.communities]
    curr_sets = [frozenset(c) for c in curr.communities]
    n_prev, n_curr = len(prev_sets), len(curr_sets)
    inter = {}
    forward = {}
    backward = {}
    for i, p in enumerate(prev_sets):
        for j, c in enumerate(curr_sets):
            k = len(p & c)
            if k:
                inter[(i, j)] = k
                forward[(i, j)] = k / len(p)
                backward[(i, j)] = k / len(c)
    events: list[EvolutionEvent] = []
    done_prev: set[int] = set()
    done_curr: set[int] = set()
    half = threshold / 2.0

    def pairs_for(preds, succs):
        return tuple(sorted(
            (i, j, forward[(i, j)], backward[(i, j)])
            for (i, j) in inter
            if i in preds and j in succs
        ))

    def emit(kind, preds, succs):
        events.append(EvolutionEvent(
            from_window=prev.window_index, to_window=curr.window_index,
            kind=kind, predecessors=tuple(sorted(preds)),
            successors=tuple(sorted(succs)),
            overlaps=pairs_for(set(preds), set(succs)),
        ))

    for j in range(n_curr):
        if not any((i, j) in inter for i in range(n_prev)):
            emit("birth", (), (j,))
            done_curr.add(j)
    for i in range(n_prev):
        if not any((i, j) in inter for j in range(n_curr)):
            emit("death", (i,), ())
            done_prev.add(i)

    for j in range(n_curr):
        if j in done_curr:
            continue
        contributors = [i for i in range(n_prev)
                        if i not in done_prev and backward.get((i, j), 0.0) >= half]
        if len(contributors) >= 2:
            emit("merge", contributors, (j,))
            done_prev.update(contributors)
            done_curr.add(j)

    for i in range(n_prev):
        if i in done_prev:
            continue
        parts = [j for j in range(n_curr)
                 if j not in done_curr and forward.get((i, j), 0.0) >= half]
        if len(parts) >= 2:
            emit("split", (i,), parts)
            done_prev.add(i)
            done_curr.update(parts)

    strong = sorted(
        ((i, j) for (i, j) in inter
         if i not in done_prev and j not in done_curr
         and forward[(i, j)] >= threshold and backward[(i, j)] >= threshold),
        key=lambda ij: (-inter[ij], ij),
    )
    for i, j in strong:
        if i in done_prev or j in done_curr:
            continue
        kind = "grow" if len(curr_sets[j]) >= len(prev_sets[i]) else "shrink"
        emit(kind, (i,), (j,))
        done_prev.add(i)
        done_curr.add(j)

    # leftovers have overlap but never met a bar; pair each with its largest
    # partner (which may already sit in another event)
    for j in range(n_curr):
        if j in done_curr:
            continue
        best = max((i for i in range(n_prev) if (i, j) in inter),
                   key=lambda i: (inter[(i, j)], -i))
        emit("partial", (best,), (j,))
        done_curr.add(j)
        done_prev.add(best)
    for i in range(n_prev):
        if i in done_prev:
            continue
        best = max((j for j in range(n_curr) if (i, j) in inter),
                   key=lambda j: (inter[(i, j)], -j))
        emit("partial", (i,), (best,))
        done_prev.add(i)
    return events


def label_snapshot(snapshot: CommunitySnapshot, seeds: dict[str, list[str]],
                   min_seed_count: int = 3) -> list[str]:
    """Label each community by the plurality of seed users it contains, or
    "other" when no label reaches ``min_seed_count`` seeds. Ties break on the
    lexicographically smaller label."""
    seed_sets = {label: frozenset(users) for label, users in seeds.items()}
    labels = []
    for members in snapshot.communities:
        mset = set(members)
        counts = {label: len(mset & users) for label, users in seed_sets.items()}
        best = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if best and best[0][1] >= min_seed_count:
            labels.append(best[0][0])
        else:
            labels.append("other")
    return labels


def label_timelines(snapshots: list[CommunitySnapshot], seeds: dict[str, list[str]],
                    min_seed_count: int = 3) -> list[CommunityTimeline]:
    """Track each label across windows; several communities in one window may
    share a label. The "other" timeline collects everything unlabeled."""
    if not seeds or any(not v for v in seeds.values()):
        raise ValueError("seed lists must be non-empty")
    all_labels = sorted(seeds) + ["other"]
    by_label_comms: dict[str, dict[int, list[int]]] = {lb: {} for lb in all_labels}
    by_label_members: dict[str, dict[int, set[str]]] = {lb: {} for lb in all_labels}
    for snap in snapshots:
        labels = label_snapshot(snap, seeds, min_seed_count)
        for cid, label in enumerate(labels):
            by_label_comms[label].setdefault(snap.window_index, []).append(cid)
            by_label_members[label].setdefault(snap.window_index, set()).update(
                snap.communities[cid])
    timelines = []
    for label in all_labels:
        timelines.append(CommunityTimeline(
            label=label,
            communities_by_window={w: tuple(v) for w, v in sorted(by_label_comms[label].items())},
            members_by_window={w: frozenset(v) for w, v in sorted(by_label_members[label].items())},
        ))
    return timelines


def affiliation_map(timelines: list[CommunityTimeline]) -> dict[tuple[int, str], str]:
    """(window, user) -> label lookup for labeled community members."""
    out: dict[tuple[int, str], str] = {}
    for tl in timelines:
        for w, members in tl.members_by_window.items():
            for user in members:
                out[(w, user)] = tl.label
    return out


def rank_influencers(corpus: Corpus, top_k: int | None = None) -> list[tuple[str, int]]:
    """Users ordered by how often they were reposted over the whole period."""
    counts: dict[str, int] = defaultdict(int)
    for rep in corpus.reposts:
        counts[rep.original_author_id] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k] if top_k is not None else ranked
