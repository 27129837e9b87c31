"""Directed-graph routines for weighted transition systems.

Cycle means are computed with exact rational arithmetic so that the
reported bounds carry no floating-point error; callers convert to
float only at the edge of the API.
"""

from fractions import Fraction


def reachable_nodes(n_nodes, edges, sources):
    """Nodes reachable from `sources` (inclusive) along directed edges."""
    adjacency = [[] for _ in range(n_nodes)]
    for u, v in edges:
        adjacency[u].append(v)
    seen = set()
    stack = [s for s in sources]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(w for w in adjacency[u] if w not in seen)
    return seen


def strongly_connected_components(n_nodes, edges):
    """Tarjan's algorithm, iterative so deep graphs cannot overflow the stack.

    Returns a list of components, each a list of node indices.
    """
    adjacency = [[] for _ in range(n_nodes)]
    for u, v in edges:
        adjacency[u].append(v)

    index = [None] * n_nodes
    lowlink = [0] * n_nodes
    on_stack = [False] * n_nodes
    stack = []
    components = []
    counter = 0

    for root in range(n_nodes):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            node, edge_pos = work[-1]
            if edge_pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            for pos in range(edge_pos, len(adjacency[node])):
                succ = adjacency[node][pos]
                if index[succ] is None:
                    work[-1] = (node, pos + 1)
                    work.append((succ, 0))
                    advanced = True
                    break
                if on_stack[succ]:
                    lowlink[node] = min(lowlink[node], index[succ])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == node:
                        break
                components.append(component)
    return components


def _karp_component(nodes, edges):
    """Karp's minimum cycle mean inside one strongly connected component.

    `nodes` are original indices; `edges` must connect nodes of the
    component only.  Returns a Fraction.
    """
    local = {node: i for i, node in enumerate(nodes)}
    m = len(nodes)
    relabeled = [(local[u], local[v], w) for u, v, w in edges]

    # D[k][v]: minimum weight of a k-edge walk from node 0 to v.
    previous = [None] * m
    previous[0] = Fraction(0)
    table = [previous]
    for _ in range(m):
        current = [None] * m
        for u, v, w in relabeled:
            if previous[u] is None:
                continue
            candidate = previous[u] + w
            if current[v] is None or candidate < current[v]:
                current[v] = candidate
        table.append(current)
        previous = current

    best = None
    last = table[m]
    for v in range(m):
        if last[v] is None:
            continue
        worst = None
        for k in range(m):
            if table[k][v] is None:
                continue
            ratio = (last[v] - table[k][v]) / (m - k)
            if worst is None or ratio > worst:
                worst = ratio
        if worst is not None and (best is None or worst < best):
            best = worst
    return best


def minimum_mean_cycle(n_nodes, edges, weights):
    """Smallest mean edge weight over all directed cycles.

    Parameters
    ----------
    n_nodes : int
    edges : sequence of (u, v) pairs
    weights : sequence of edge weights, exact types preferred
        (int or Fraction; floats are converted through their repr).

    Returns
    -------
    Fraction, or None when the graph has no cycle.
    """
    exact = [w if isinstance(w, (int, Fraction)) else Fraction(str(w)) for w in weights]
    weighted = [(u, v, exact[i]) for i, (u, v) in enumerate(edges)]

    best = None
    for component in strongly_connected_components(n_nodes, edges):
        members = set(component)
        internal = [(u, v, w) for u, v, w in weighted if u in members and v in members]
        if len(component) == 1 and not any(u == v for u, v, _ in internal):
            continue
        if not internal:
            continue
        value = _karp_component(component, internal)
        if value is not None and (best is None or value < best):
            best = value
    return best


def maximum_mean_cycle(n_nodes, edges, weights):
    """Largest mean edge weight over all directed cycles; None if acyclic."""
    exact = [w if isinstance(w, (int, Fraction)) else Fraction(str(w)) for w in weights]
    value = minimum_mean_cycle(n_nodes, edges, [-w for w in exact])
    return None if value is None else -value
