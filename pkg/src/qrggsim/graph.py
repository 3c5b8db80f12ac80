"""Connectivity graphs and exact s-t min-cut / multicast capacity.

Node ids are fixed by construction: 0 is the source, 1..n_relays are relays,
and the next n_terminals ids are terminals. The adjacency matrix holds 0/1
unit capacities; source-terminal and terminal-terminal entries are forced to
zero (messages always pass through at least one relay, and terminal-terminal
proximity can never carry source-to-terminal flow).
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import ConnectionModel, kernel_probability, sample_points
from .rng import RandomStream

BRUTE_FORCE_MAX_RELAYS = 20


@dataclass(frozen=True)
class ConnectivityGraph:
    n_relays: int
    n_terminals: int
    adjacency: np.ndarray  # (N, N) uint8, N = 1 + n_relays + n_terminals
    positions: np.ndarray | None = None
    model: ConnectionModel | None = None
    seed: int | None = None

    def __post_init__(self):
        n_total = 1 + self.n_relays + self.n_terminals
        a = self.adjacency
        if a.shape != (n_total, n_total):
            raise ValueError("adjacency shape does not match node counts")
        if np.any(a != a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("no self-loops")
        for t in self.terminal_ids:
            if a[0, t] != 0:
                raise ValueError("source-terminal edges are forbidden")
        tb = np.ix_(self.terminal_ids, self.terminal_ids)
        if np.any(a[tb] != 0):
            raise ValueError("terminal-terminal edges are forbidden")
        a.setflags(write=False)

    @property
    def source(self) -> int:
        return 0

    @property
    def relay_ids(self) -> list[int]:
        return list(range(1, 1 + self.n_relays))

    @property
    def terminal_ids(self) -> list[int]:
        return list(range(1 + self.n_relays, 1 + self.n_relays + self.n_terminals))

    @property
    def n_nodes(self) -> int:
        return 1 + self.n_relays + self.n_terminals

    def source_degree(self) -> int:
        return int(self.adjacency[0].sum())

    def edge_list(self) -> list[tuple[int, int]]:
        """All unit edges as sorted (i, j) pairs with i < j."""
        iu, ju = np.triu_indices(self.n_nodes, k=1)
        mask = self.adjacency[iu, ju] > 0
        return sorted(zip(iu[mask].tolist(), ju[mask].tolist()))

    def with_edge(self, i: int, j: int) -> "ConnectivityGraph":
        """Copy of the graph with edge (i, j) added."""
        a = self.adjacency.copy()
        a[i, j] = a[j, i] = 1
        return ConnectivityGraph(
            self.n_relays, self.n_terminals, a, self.positions, self.model, self.seed
        )


def from_edges(
    n_relays: int,
    n_terminals: int,
    edges,
    positions=None,
    model: ConnectionModel | None = None,
    seed: int | None = None,
) -> ConnectivityGraph:
    """Build a graph from an explicit edge list (fixtures, JSON loading)."""
    n_total = 1 + n_relays + n_terminals
    a = np.zeros((n_total, n_total), dtype=np.uint8)
    for i, j in edges:
        if i == j or not (0 <= i < n_total and 0 <= j < n_total):
            raise ValueError(f"bad edge ({i}, {j})")
        a[i, j] = a[j, i] = 1
    pos = None if positions is None else np.asarray(positions, dtype=float)
    return ConnectivityGraph(n_relays, n_terminals, a, pos, model, seed)


def build_connectivity_graph(
    n_relays: int,
    n_terminals: int,
    model: ConnectionModel,
    rng: RandomStream,
) -> ConnectivityGraph:
    """Sample positions and realize the connectivity graph.

    Geometry and edge randomness come from separate child streams. Edge pairs
    are processed in canonical (i < j) order; role-forbidden pairs are skipped
    outright and deterministic pairs (probability 0 or 1) consume no draw, so
    stream positions are stable across parameter changes.
    """
    if n_relays < 1 or n_terminals < 1:
        raise ValueError("need at least one relay and one terminal")
    n_total = 1 + n_relays + n_terminals
    positions = sample_points(n_total, rng.child("positions"))
    edge_rng = rng.child("edges")

    iu, ju = np.triu_indices(n_total, k=1)
    # Drop source-terminal and terminal-terminal pairs from the enumeration.
    first_t = 1 + n_relays
    is_term_i = iu >= first_t
    is_term_j = ju >= first_t
    is_source_i = iu == 0
    allowed = ~((is_source_i & is_term_j) | (is_term_i & is_term_j))
    iu, ju = iu[allowed], ju[allowed]

    d = np.hypot(
        positions[iu, 0] - positions[ju, 0], positions[iu, 1] - positions[ju, 1]
    )
    probs = kernel_probability(d, model)
    accept = probs >= 1.0
    stochastic = (probs > 0.0) & (probs < 1.0)
    draws = edge_rng.random(int(stochastic.sum()))
    accept[stochastic] = draws < probs[stochastic]

    a = np.zeros((n_total, n_total), dtype=np.uint8)
    a[iu[accept], ju[accept]] = 1
    a[ju[accept], iu[accept]] = 1
    return ConnectivityGraph(
        n_relays, n_terminals, a, positions, model, int(rng.master_seed)
    )


@dataclass(frozen=True)
class CutResult:
    terminal: int
    partition_vk: tuple[int, ...]  # source-side relays, sorted
    k: int
    capacity: int
    is_minimum: bool


def _check_terminal(graph: ConnectivityGraph, terminal: int):
    if terminal not in graph.terminal_ids:
        raise ValueError(f"unknown terminal id {terminal}")


def cut_capacity(graph: ConnectivityGraph, terminal: int, partition_vk) -> int:
    """Crossing capacity of the relay partition (V_k source side)."""
    _check_terminal(graph, terminal)
    vk = sorted(set(int(x) for x in partition_vk))
    relay_set = set(graph.relay_ids)
    if not set(vk) <= relay_set:
        raise ValueError("partition must be a subset of the relays")
    vbar = sorted(relay_set - set(vk))
    a = graph.adjacency
    total = int(a[0, vbar].sum()) if vbar else 0
    if vk and vbar:
        total += int(a[np.ix_(vk, vbar)].sum())
    if vk:
        total += int(a[vk, terminal].sum())
    return total


class _Dinic:
    """Unit-capacity max flow with BFS level graphs."""

    def __init__(self, n: int):
        self.n = n
        self.head = [[] for _ in range(n)]  # node -> list of edge indices
        self.to = []
        self.cap = []

    def add_edge(self, u: int, v: int, cap: int):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def add_undirected(self, u: int, v: int):
        # Two antiparallel unit arcs; residual cancellation keeps cut values
        # identical to the undirected formulation.
        self.add_edge(u, v, 1)
        self.add_edge(v, u, 1)

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    q.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, f: int, it) -> int:
        if u == t:
            return f
        while it[u] < len(self.head[u]):
            e = self.head[u][it[u]]
            v = self.to[e]
            if self.cap[e] > 0 and self.level[v] == self.level[u] + 1:
                d = self._dfs(v, t, min(f, self.cap[e]), it)
                if d > 0:
                    self.cap[e] -= d
                    self.cap[e ^ 1] += d
                    return d
            it[u] += 1
        return 0

    def max_flow(self, s: int, t: int, limit: int | None = None) -> int:
        flow = 0
        while self._bfs(s, t):
            it = [0] * self.n
            while True:
                budget = (limit - flow) if limit is not None else (1 << 30)
                if budget <= 0:
                    return flow
                f = self._dfs(s, t, budget, it)
                if f == 0:
                    break
                flow += f
            if limit is not None and flow >= limit:
                return flow
        return flow

    def residual_reachable(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0 and v not in seen:
                    seen.add(v)
                    q.append(v)
        return seen


def _flow_network(graph: ConnectivityGraph, terminal: int) -> _Dinic:
    """Directed unit-capacity network for one s-t computation.

    The source has only outgoing arcs, the chosen terminal only incoming
    arcs, and the other terminals are absorbing (all their edges dropped).
    """
    a = graph.adjacency
    dinic = _Dinic(graph.n_nodes)
    for i in graph.relay_ids:
        if a[0, i]:
            dinic.add_edge(0, i, 1)
    relays = graph.relay_ids
    for idx, i in enumerate(relays):
        for j in relays[idx + 1 :]:
            if a[i, j]:
                dinic.add_undirected(i, j)
    for i in relays:
        if a[i, terminal]:
            dinic.add_edge(i, terminal, 1)
    return dinic


def min_cut(graph: ConnectivityGraph, terminal: int) -> CutResult:
    """Exact s-t min cut via integer max flow; certificate is the
    source-side-minimal relay partition (residual reachability)."""
    _check_terminal(graph, terminal)
    dinic = _flow_network(graph, terminal)
    value = dinic.max_flow(0, terminal)
    reachable = dinic.residual_reachable(0)
    partition = tuple(sorted(r for r in graph.relay_ids if r in reachable))
    return CutResult(
        terminal=terminal,
        partition_vk=partition,
        k=len(partition),
        capacity=value,
        is_minimum=True,
    )


def edge_disjoint_paths(
    graph: ConnectivityGraph, terminal: int, limit: int | None = None
) -> list[list[int]]:
    """Decompose an integral max flow into edge-disjoint s->t node paths."""
    _check_terminal(graph, terminal)
    dinic = _Dinic(graph.n_nodes)
    a = graph.adjacency
    # Rebuild with original capacities remembered for flow extraction.
    arcs = []  # (u, v, edge_index)
    for i in graph.relay_ids:
        if a[0, i]:
            arcs.append((0, i, len(dinic.to)))
            dinic.add_edge(0, i, 1)
    relays = graph.relay_ids
    for idx, i in enumerate(relays):
        for j in relays[idx + 1 :]:
            if a[i, j]:
                arcs.append((i, j, len(dinic.to)))
                dinic.add_edge(i, j, 1)
                arcs.append((j, i, len(dinic.to)))
                dinic.add_edge(j, i, 1)
    for i in relays:
        if a[i, terminal]:
            arcs.append((i, terminal, len(dinic.to)))
            dinic.add_edge(i, terminal, 1)
    flow = dinic.max_flow(0, terminal, limit=limit)

    # Net flow per directed arc, cancelling antiparallel relay-relay flow.
    out_flow: dict[int, list[int]] = {}
    net: dict[tuple[int, int], int] = {}
    for u, v, e in arcs:
        f = dinic.cap[e ^ 1]  # reverse-edge capacity equals pushed flow
        if f > 0:
            net[(u, v)] = net.get((u, v), 0) + f
    for (u, v), f in list(net.items()):
        back = net.get((v, u), 0)
        if back > 0:
            cancel = min(f, back)
            net[(u, v)] -= cancel
            net[(v, u)] -= cancel
    for (u, v), f in net.items():
        if f > 0:
            out_flow.setdefault(u, []).append(v)
    for v in out_flow:
        out_flow[v].sort()

    paths = []
    for _ in range(flow):
        path = [0]
        u = 0
        while u != terminal:
            v = out_flow[u].pop(0)
            path.append(v)
            u = v
        paths.append(path)
    return paths


def brute_force_min_cut(graph: ConnectivityGraph, terminal: int) -> CutResult:
    """Independent oracle: exhaustive minimum over all relay partitions.

    Ties broken by lexicographically smallest sorted V_k tuple.
    """
    _check_terminal(graph, terminal)
    n = graph.n_relays
    if n > BRUTE_FORCE_MAX_RELAYS:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_RELAYS}")
    relays = np.array(graph.relay_ids, dtype=int)
    a = graph.adjacency
    s_row = a[0, relays].astype(int)
    t_col = a[relays, terminal].astype(int)
    rr = a[np.ix_(relays, relays)].astype(int)

    best_value = None
    best_tuple = None
    for mask in range(1 << n):
        sel = np.array([(mask >> b) & 1 for b in range(n)], dtype=bool)
        value = int(s_row[~sel].sum())
        if sel.any() and (~sel).any():
            value += int(rr[np.ix_(sel, ~sel)].sum())
        value += int(t_col[sel].sum())
        vk = tuple(int(r) for r in relays[sel])
        if best_value is None or value < best_value or (
            value == best_value and vk < best_tuple
        ):
            best_value = value
            best_tuple = vk
    return CutResult(
        terminal=terminal,
        partition_vk=best_tuple,
        k=len(best_tuple),
        capacity=best_value,
        is_minimum=True,
    )


def multicast_capacity(graph: ConnectivityGraph) -> int:
    """Network coding multicast capacity: min over terminals of the min cut."""
    if graph.n_terminals < 1:
        raise ValueError("need at least one terminal")
    return min(min_cut(graph, t).capacity for t in graph.terminal_ids)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def graph_to_json(graph: ConnectivityGraph) -> dict:
    positions = (
        [] if graph.positions is None else [[float(x), float(y)] for x, y in graph.positions]
    )
    return {
        "n_relays": graph.n_relays,
        "terminals": graph.terminal_ids,
        "positions": positions,
        "edges": [[i, j] for i, j in graph.edge_list()],
        "model": None if graph.model is None else graph.model.to_json(),
        "seed": graph.seed,
    }


def graph_from_json(obj: dict) -> ConnectivityGraph:
    n_relays = int(obj["n_relays"])
    n_terminals = len(obj["terminals"])
    model = None if obj.get("model") is None else ConnectionModel.from_json(obj["model"])
    positions = obj.get("positions") or None
    return from_edges(
        n_relays, n_terminals, obj["edges"], positions=positions, model=model,
        seed=obj.get("seed"),
    )


def save_graph(graph: ConnectivityGraph, path: str):
    write_json_atomic(path, graph_to_json(graph))


def load_graph(path: str) -> ConnectivityGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(json.load(fh))


def write_json_atomic(path: str, obj):
    """Serialize to a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

def wheatstone_graph() -> ConnectivityGraph:
    """Source X - relay A - relay B - terminal Y chain; min cut 1."""
    return from_edges(2, 1, [(0, 1), (1, 2), (2, 3)])


def butterfly_graph() -> ConnectivityGraph:
    """Four-relay butterfly with two terminals; multicast capacity 2.

    Relays: a=1, b=2, c=3 (mixing node), d=4. Terminals: t1=5, t2=6.
    """
    edges = [
        (0, 1), (0, 2),        # s-a, s-b
        (1, 3), (2, 3),        # a-c, b-c
        (3, 4),                # c-d (bottleneck)
        (1, 5), (2, 6),        # a-t1, b-t2
        (4, 5), (4, 6),        # d-t1, d-t2
    ]
    return from_edges(4, 2, edges)
