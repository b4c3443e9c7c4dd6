"""Text formats: edge lists, partition sidecars, packing files.

Edge-list format: first line ``n m``, then m lines ``u v`` with 0-indexed
endpoints, u < v, space-separated, LF line endings. Partition sidecar:
one ``vertex part_name`` line per vertex.
"""

from pathlib import Path

from .graph import Graph, VertexPartition, build_graph


def write_graph(g: Graph, path):
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> Graph:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m = map(int, lines[0].split())
    edges = []
    for ln in lines[1:]:
        u, v = map(int, ln.split())
        if u >= v:
            raise ValueError(f"edge line not in u < v form: {ln!r}")
        edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"header says {m} edges, file has {len(edges)}")
    return build_graph(n, edges)


def write_partition(partition: VertexPartition, path):
    lines = [
        f"{v} {partition.part_names[pid]}"
        for v, pid in enumerate(partition.part_of)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_partition(path, allowed_name_pairs=()) -> VertexPartition:
    """Read a sidecar; the allowed relation is not stored in the file, so
    callers that care pass it explicitly (default: nothing allowed)."""
    entries = []
    for ln in Path(path).read_text().splitlines():
        if not ln.strip():
            continue
        v, name = ln.split()
        entries.append((int(v), name))
    entries.sort()
    names = []
    seen = {}
    for _, name in entries:
        if name not in seen:
            seen[name] = len(names)
            names.append(name)
    blocks = [[] for _ in names]
    for v, name in entries:
        blocks[seen[name]].append(v)
    return VertexPartition.from_blocks(
        blocks, names, allowed_name_pairs, n=len(entries)
    )


def write_packing_maps(copies, path):
    """One vertex-map per line: images of pattern vertices 0..h-1."""
    lines = [" ".join(str(x) for x in copy) for copy in copies]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_packing_maps(path):
    maps = []
    for ln in Path(path).read_text().splitlines():
        if ln.strip():
            maps.append(tuple(int(x) for x in ln.split()))
    return maps
