"""Pure-Python reference for the caller-graph reachability kernel."""
import numpy as np


def reach_many(indptr, indices, terminal, starts):
    """Nodes reachable from each start over a CSR graph.

    Terminal nodes are collected but never expanded. The start node itself
    is expanded even when terminal and appears in its own result only if
    some path leads back to it. Returns ``(out_ptr, out_nodes)`` in CSR
    form, each row sorted ascending.
    """
    indptr = np.asarray(indptr, dtype=np.int32)
    indices = np.asarray(indices, dtype=np.int32)
    terminal = np.asarray(terminal, dtype=np.uint8)
    starts = np.asarray(starts, dtype=np.int32)
    ptr = indptr.tolist()
    idx = indices.tolist()
    term = terminal.tolist()
    out_ptr = [0]
    out_nodes: list[int] = []
    for s in starts.tolist():
        seen = set()
        stack = [s]
        expanded = {s}
        while stack:
            u = stack.pop()
            for k in range(ptr[u], ptr[u + 1]):
                v = idx[k]
                if v in seen:
                    continue
                seen.add(v)
                if not term[v] and v not in expanded:
                    expanded.add(v)
                    stack.append(v)
        out_nodes.extend(sorted(seen))
        out_ptr.append(len(out_nodes))
    return np.asarray(out_ptr, dtype=np.int64), np.asarray(out_nodes, dtype=np.int32)
