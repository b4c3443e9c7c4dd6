"""Graph homomorphisms, cores, and minimal homomorphic-image families."""

from dataclasses import dataclass

from ._kernels import assignment_order, find_injective
from .errors import AuditError, SizeBudgetError
from .graph import Graph, induced_subgraph
from .util import iter_bits, node_budget

MINIMAL_IMAGES_MAX_H = 10
CORE_MAX_N = 12


@dataclass(frozen=True)
class Homomorphism:
    """Vertex map witnessing H -> F: every H-edge lands on an F-edge."""

    map: tuple

    def verify(self, h: Graph, f: Graph) -> bool:
        return all(f.has_edge(self.map[u], self.map[v]) for u, v in h.edges())


@dataclass(frozen=True)
class MinimalImageFamily:
    members: tuple      # canonical small graphs, sorted by (n, m, edges)
    witnesses: tuple    # Homomorphism from H into each member


def find_homomorphism(h: Graph, f: Graph, budget=None):
    """Backtracking search for a homomorphism H -> F, or None.

    Forward checking with deterministic minimum-remaining-values order; the
    witness is the one found by the deterministically-first branch. Budget
    exhaustion raises, it is never reported as "no homomorphism".
    """
    budget = node_budget(budget)
    if h.m == 0:
        if f.n == 0 and h.n > 0:
            return None
        return Homomorphism(tuple([0] * h.n)) if (h.n == 0 or f.n > 0) else None
    if f.m == 0:
        return None
    full = f.vertex_mask()
    domains = [full] * h.n
    assignment = [-1] * h.n
    nodes = 0
    order_hint = {v: i for i, v in enumerate(assignment_order(h.adjacency))}

    def propagate(u, img, domains):
        new = list(domains)
        row = f.adjacency[img]
        for w in iter_bits(h.adjacency[u]):
            if assignment[w] == -1:
                nd = new[w] & row
                if not nd:
                    return None
                new[w] = nd
        return new

    def choose(domains):
        pick, key = -1, None
        for u in range(h.n):
            if assignment[u] != -1:
                continue
            k = (domains[u].bit_count(), order_hint[u])
            if key is None or k < key:
                pick, key = u, k
        return pick

    def search(domains, depth):
        nonlocal nodes
        if depth == h.n:
            return True
        u = choose(domains)
        cand = domains[u]
        while cand:
            low = cand & -cand
            cand ^= low
            img = low.bit_length() - 1
            nodes += 1
            if nodes > budget:
                from .errors import BudgetExceededError
                raise BudgetExceededError(nodes)
            assignment[u] = img
            nxt = propagate(u, img, domains)
            if nxt is not None and search(nxt, depth + 1):
                return True
            assignment[u] = -1
        return False

    if not search(domains, 0):
        return None
    hom = Homomorphism(tuple(assignment))
    if not hom.verify(h, f):
        raise AuditError("search returned a non-homomorphism")
    return hom


# -- injective copies (subgraph containment) ---------------------------------

def find_injective_copy(pattern: Graph, host: Graph, budget=None):
    """First labeled copy (injective edge-preserving map) or None."""
    budget = node_budget(budget)
    order = assignment_order(pattern.adjacency)
    cand = [host.vertex_mask()] * pattern.n
    return find_injective(pattern.adjacency, order, host, cand, budget)


def is_family_free(g: Graph, family, budget=None):
    """True iff g contains no subgraph copy of any family member.

    Returns (free, witness); witness is (member_index, vertex_map) for the
    first member found, in family order.
    """
    members = getattr(family, "members", family)
    for idx, member in enumerate(members):
        found = find_injective_copy(member, g, budget)
        if found is not None:
            return False, (idx, found)
    return True, None


# -- isomorphism (tiny graphs) ------------------------------------------------

def is_isomorphic(g1: Graph, g2: Graph, budget=None) -> bool:
    if g1.n != g2.n or g1.m != g2.m:
        return False
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return False
    if g1.n == 0:
        return True
    # injective, edge-count equal -> any copy of g1 in g2 is an isomorphism
    return find_injective_copy(g1, g2, budget) is not None


# -- cores ---------------------------------------------------------------------

def core_of(g: Graph, budget=None) -> Graph:
    """Smallest retract: induced F with G -> F (and F -> G by inclusion).

    Repeatedly finds an endomorphism into a one-vertex-deleted induced
    subgraph and shrinks to its image; deterministic (vertices ascending).
    """
    if g.n > CORE_MAX_N:
        raise SizeBudgetError(f"core search capped at n={CORE_MAX_N}")
    cur = g
    while True:
        shrunk = False
        for v in range(cur.n):
            keep = [u for u in range(cur.n) if u != v]
            sub, mapping = induced_subgraph(cur, keep)
            hom = find_homomorphism(cur, sub, budget)
            if hom is None:
                continue
            image = sorted({mapping[t] for t in hom.map})
            cur, _ = induced_subgraph(cur, image)
            shrunk = True
            break
        if not shrunk:
            return cur


# -- minimal homomorphic images -------------------------------------------------

def _independent_partitions(h: Graph):
    """All partitions of V(H) into independent classes (class masks)."""
    results = []
    classes = []

    def rec(v):
        if v == h.n:
            results.append(tuple(classes))
            return
        row = h.adjacency[v]
        for i in range(len(classes)):
            if not (classes[i] & row):
                classes[i] |= 1 << v
                rec(v + 1)
                classes[i] &= ~(1 << v)
        classes.append(1 << v)
        rec(v + 1)
        classes.pop()

    rec(0)
    return results


def _quotient(h: Graph, classes):
    k = len(classes)
    rows = [0] * k
    for i in range(k):
        merged = 0
        for v in iter_bits(classes[i]):
            merged |= h.adjacency[v]
        for j in range(k):
            if j != i and (merged & classes[j]):
                rows[i] |= 1 << j
    return Graph(k, tuple(rows))


def _graph_sort_key(g: Graph):
    return (g.n, g.m, tuple(sorted(g.degrees())), tuple(g.edges()))


def minimal_images(h: Graph, budget=None) -> MinimalImageFamily:
    """The family of inclusion-minimal graphs H' with H -> H'.

    Complete by quotient enumeration: every homomorphic image of H is a
    quotient by independent vertex classes; each quotient is cored,
    deduplicated up to isomorphism, then filtered for subgraph-minimality.
    """
    if h.n > MINIMAL_IMAGES_MAX_H:
        raise SizeBudgetError(
            f"image enumeration capped at v(H)={MINIMAL_IMAGES_MAX_H}"
        )
    reps = []
    for classes in _independent_partitions(h):
        q = _quotient(h, classes)
        cored = core_of(q, budget)
        if not any(is_isomorphic(cored, r, budget) for r in reps):
            reps.append(cored)
    reps.sort(key=_graph_sort_key)
    minimal = []
    for i, m in enumerate(reps):
        dominated = False
        for j, other in enumerate(reps):
            if i == j or other.n > m.n or other.m > m.m:
                continue
            if find_injective_copy(other, m, budget) is not None:
                dominated = True
                break
        if not dominated:
            minimal.append(m)
    witnesses = []
    for m in minimal:
        hom = find_homomorphism(h, m, budget)
        if hom is None:
            raise AuditError("every minimal image must admit a witness")
        witnesses.append(hom)
    return MinimalImageFamily(tuple(minimal), tuple(witnesses))
