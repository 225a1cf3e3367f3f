"""Small deterministic digraph helpers shared by the analysis modules.

All functions take adjacency as a mapping node -> iterable of successors
and iterate in sorted order so results are stable across runs.
"""

from __future__ import annotations

from typing import Iterable, Mapping


def _sorted_succ(adjacency: Mapping, node) -> list:
    return sorted(adjacency.get(node, ()))


def reachable_from(adjacency: Mapping, roots: Iterable) -> set:
    """All nodes reachable from ``roots`` (roots included)."""
    seen = set()
    stack = sorted(roots, reverse=True)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        for succ in _sorted_succ(adjacency, node):
            if succ not in seen:
                stack.append(succ)
    return seen


def find_cycle(adjacency: Mapping, nodes: Iterable) -> tuple | None:
    """One cycle as a node tuple (first == repeated entry), or None if acyclic."""
    color: dict = {}
    parent: dict = {}
    for root in sorted(nodes):
        if color.get(root):
            continue
        stack = [(root, iter(_sorted_succ(adjacency, root)))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for succ in it:
                if color.get(succ) == 1:
                    cycle = [succ, node]
                    cur = node
                    while cur != succ:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return tuple(cycle[:-1])
                if not color.get(succ):
                    color[succ] = 1
                    parent[succ] = node
                    stack.append((succ, iter(_sorted_succ(adjacency, succ))))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return None


def transitive_closure(adjacency: Mapping, nodes: Iterable) -> set[tuple]:
    """All ordered pairs (a, b) with b reachable from a in >= 1 step."""
    pairs: set[tuple] = set()
    for node in sorted(nodes):
        seen: set = set()
        stack = _sorted_succ(adjacency, node)
        while stack:
            succ = stack.pop()
            if succ in seen:
                continue
            seen.add(succ)
            stack.extend(_sorted_succ(adjacency, succ))
        pairs.update((node, other) for other in seen)
    return pairs


def simple_cycles(adjacency: Mapping, nodes: Iterable) -> list[tuple]:
    """Every simple cycle, canonicalized (rotated to the least node) and sorted.

    Plain recursive enumeration rooted at each node, restricted to nodes
    not less than the root; fine for the small projections used here.
    """
    out: set[tuple] = set()
    ordered = sorted(nodes)

    def search(root, node, path: list, on_path: set) -> None:
        for succ in _sorted_succ(adjacency, node):
            if succ == root:
                out.add(tuple(path))
            elif succ > root and succ not in on_path:
                path.append(succ)
                on_path.add(succ)
                search(root, succ, path, on_path)
                on_path.remove(succ)
                path.pop()

    for root in ordered:
        search(root, root, [root], {root})
    return sorted(out, key=lambda c: (len(c), c))


def longest_path_to(adjacency: Mapping, nodes: Iterable, sink) -> dict:
    """Length of the longest path from each node to ``sink`` on a DAG.

    Nodes that cannot reach ``sink`` are absent from the result.
    """
    memo: dict = {sink: 0}
    visiting: set = set()

    def length(node) -> int | None:
        if node in memo:
            return memo[node]
        if node in visiting:
            raise ValueError("graph is not acyclic")
        visiting.add(node)
        best: int | None = None
        for succ in _sorted_succ(adjacency, node):
            sub = length(succ)
            if sub is not None and (best is None or sub + 1 > best):
                best = sub + 1
        visiting.remove(node)
        memo[node] = best
        return best

    for node in sorted(nodes):
        length(node)
    return {node: value for node, value in memo.items() if value is not None}
