import io

import numpy as np
import pytest

from ccmsampler.graph import ColoredMultigraph, load_graph

# Seven-vertex example: vertex 2 has four red neighbors (counting the double
# edge to 1) and one blue neighbor, vertex 5 has three red neighbors.
FIG1_COLORS = "1\tred\n2\tred\n3\tred\n4\tred\n5\tblue\n6\tblue\n7\tblue\n"
FIG1_EDGES = "1\t2\n1\t2\n2\t3\n2\t4\n2\t6\n4\t5\n3\t5\n1\t5\n4\t7\n"


@pytest.fixture
def fig1():
    return load_graph(io.StringIO(FIG1_COLORS), io.StringIO(FIG1_EDGES))


def vid(g, name):
    return g.vertex_names.index(str(name))


def random_graph(rng, n, m, k, loops=True):
    colors = rng.integers(0, k, n)
    colors[:k] = np.arange(k)
    edges = []
    while len(edges) < m:
        u, v = (int(a) for a in rng.integers(0, n, 2))
        if u == v and not loops:
            continue
        edges.append((u, v))
    return ColoredMultigraph(colors, edges)


def assortative_graph(rng, n, m, bias=4.0):
    """Two colors, within-color edges ``bias`` times as likely as cross edges."""
    colors = np.arange(n) % 2
    groups = [np.flatnonzero(colors == c) for c in (0, 1)]
    edges = []
    p_within = bias / (bias + 1)
    while len(edges) < m:
        if rng.random() < p_within:
            grp = groups[rng.integers(2)]
            u, v = rng.choice(grp, 2, replace=False)
        else:
            u, v = rng.choice(groups[0]), rng.choice(groups[1])
        edges.append((int(u), int(v)))
    return ColoredMultigraph(colors, edges)


# tiny instances for exhaustive checks: (name, colors, edges)
TINY = [
    ("bichromatic_only", [0, 0, 1, 1, 0, 1], [(0, 2), (1, 3), (4, 5), (0, 3), (1, 2)]),
    ("mono_multi_loops", [0, 0, 0, 0], [(0, 1), (0, 1), (2, 2), (2, 3), (3, 3)]),
    ("two_color_mixed", [0, 0, 0, 1, 1, 1], [(0, 1), (1, 2), (0, 3), (1, 4), (2, 5), (3, 4), (4, 5)]),
    ("loops_two_colors", [0, 0, 0, 1, 1], [(0, 0), (1, 2), (0, 3), (1, 4), (2, 3), (3, 4), (4, 4)]),
    ("two_mono_classes", [0, 0, 0, 1, 1, 1], [(0, 1), (1, 2), (0, 0), (3, 4), (4, 5), (3, 5), (3, 3)]),
    ("star_multi", [0, 1, 1, 1, 0], [(0, 1), (0, 1), (0, 2), (0, 3), (4, 2), (4, 3)]),
]


def tiny(name):
    for nm, colors, edges in TINY:
        if nm == name:
            return ColoredMultigraph(colors, edges)
    raise KeyError(name)


@pytest.fixture(params=[t[0] for t in TINY])
def tiny_graph(request):
    return tiny(request.param)


# ------------------------------------------------------------ walk instances
def two_cliques(size=5):
    colors = [0] * size + [1] * size
    edges = [(a, b) for a in range(size) for b in range(a + 1, size)]
    edges += [(a + size, b + size) for a, b in edges]
    return ColoredMultigraph(colors, edges)


def mirrored_hubs():
    """Hub 0 (side A) and hub 4 (side B); every other vertex has one edge to
    its own hub and three to the opposite one.  With restart 1/3 a walk from
    either side is absorbed on side A with probability exactly 1/2."""
    colors = [0, 0, 0, 0, 1, 1, 1, 1]
    edges = []
    for v in (1, 2, 3):
        edges += [(v, 0)] + [(v, 4)] * 3
    for v in (5, 6, 7):
        edges += [(v, 4)] + [(v, 0)] * 3
    return ColoredMultigraph(colors, edges)


def simulate_absorption(g, side_of, infl, restart, start_side, walks, rng):
    """Vectorised restart walks; returns the fraction absorbed on each side."""
    nbrs = [[] for _ in range(g.n)]
    for u, v in g.edges():
        nbrs[u].append(v)
        nbrs[v].append(u)
    deg = np.array([len(x) for x in nbrs])
    ptr = np.concatenate([[0], np.cumsum(deg)])
    flat = np.array([w for x in nbrs for w in x])
    label = np.full(g.n, -1)
    for s in (0, 1):
        label[infl[s]] = s
    home = np.flatnonzero(side_of == start_side)
    pos = rng.choice(home, walks)
    result = np.full(walks, -1)
    alive = np.arange(walks)
    while alive.size:
        hit = label[pos[alive]] >= 0
        result[alive[hit]] = label[pos[alive[hit]]]
        alive = alive[~hit]
        restart_now = rng.random(alive.size) < restart
        cur = pos[alive]
        step = ptr[cur] + (rng.random(alive.size) * np.maximum(deg[cur], 1)).astype(int)
        moved = np.where(deg[cur] > 0, flat[np.minimum(step, len(flat) - 1)], cur)
        pos[alive] = np.where(restart_now, rng.choice(home, alive.size), moved)
    return np.bincount(result, minlength=2) / walks
