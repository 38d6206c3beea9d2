"""Vertex-colored multigraphs with constant-time swap support.

Edge occurrences live in a flat slot list.  A slot keeps its index for the
whole life of the graph: a swap rewrites two slots in place, so occurrence
handles (slot indices) stay valid, and staleness is detected by comparing the
endpoints a proposal expects with what the slot currently holds.

Each occurrence is stored with a canonical orientation: for a bichromatic
edge the endpoint with the smaller color id comes first, for a monochromatic
edge the smaller vertex id comes first.  Multiplicities are keyed by the
sorted vertex pair.
"""
from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph input."""


class StaleHandleError(RuntimeError):
    """Raised when a swap references an occurrence that has since changed."""


def pair_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


def class_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


class ColoredMultigraph:
    """Undirected multigraph with colored vertices.

    Parameters
    ----------
    colors : sequence of int
        Color id of every vertex; vertices are ``0..n-1``.
    edges : iterable of (int, int)
        Edge occurrences.  Repeated pairs encode multiplicity, ``(v, v)`` is a
        self-loop.
    vertex_names, color_names : sequence, optional
        Original labels kept for output.
    """

    def __init__(
        self,
        colors: Sequence[int],
        edges: Iterable[tuple[int, int]] = (),
        vertex_names: Sequence[Hashable] | None = None,
        color_names: Sequence[Hashable] | None = None,
    ):
        self.color = np.asarray(colors, dtype=np.int64).copy()
        if self.color.ndim != 1:
            raise ValueError("colors must be one-dimensional")
        n = len(self.color)
        if n and self.color.min() < 0:
            raise ValueError("color ids must be non-negative")
        n_colors = int(self.color.max()) + 1 if n else 0
        if color_names is not None:
            n_colors = max(n_colors, len(color_names))
        self.n_colors = n_colors
        self.vertex_names = list(vertex_names) if vertex_names is not None else list(range(n))
        self.color_names = list(color_names) if color_names is not None else list(range(n_colors))
        if len(self.vertex_names) != n:
            raise ValueError("vertex_names length does not match colors")

        self._src: list[int] = []
        self._dst: list[int] = []
        self._cls: list[tuple[int, int]] = []
        self._pos: list[int] = []
        self._classes: dict[tuple[int, int], list[int]] = {}
        self._mult: Counter = Counter()
        self._cdeg = np.zeros((n_colors, n), dtype=np.int64)
        for u, v in edges:
            self._append(int(u), int(v))

    # ------------------------------------------------------------------ basics
    @property
    def n(self) -> int:
        return len(self.color)

    @property
    def m(self) -> int:
        return len(self._src)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"ColoredMultigraph(n={self.n}, m={self.m}, colors={self.n_colors})"

    def copy(self) -> "ColoredMultigraph":
        return ColoredMultigraph(
            self.color, self.edges(), self.vertex_names, self.color_names
        )

    def _orient(self, u: int, v: int) -> tuple[int, int]:
        cu, cv = self.color[u], self.color[v]
        if cu < cv or (cu == cv and u <= v):
            return u, v
        return v, u

    def _append(self, u: int, v: int) -> None:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise IndexError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
        u, v = self._orient(u, v)
        slot = len(self._src)
        self._src.append(u)
        self._dst.append(v)
        key = class_key(int(self.color[u]), int(self.color[v]))
        members = self._classes.setdefault(key, [])
        self._cls.append(key)
        self._pos.append(len(members))
        members.append(slot)
        self._mult[pair_key(u, v)] += 1
        self._cdeg[self.color[v], u] += 1
        self._cdeg[self.color[u], v] += 1

    # ----------------------------------------------------------------- queries
    def occurrence(self, slot: int) -> tuple[int, int]:
        """Endpoints of an occurrence in canonical orientation."""
        return self._src[slot], self._dst[slot]

    def multiplicity(self, u: int, v: int) -> int:
        return self._mult.get(pair_key(u, v), 0)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self._src, self._dst))

    def edge_array(self) -> np.ndarray:
        return np.array([self._src, self._dst], dtype=np.int64).T.reshape(-1, 2)

    def class_sizes(self) -> dict[tuple[int, int], int]:
        return {k: len(v) for k, v in self._classes.items() if v}

    def class_members(self, key: tuple[int, int]) -> list[int]:
        return list(self._classes.get(class_key(*key), []))

    def class_of(self, slot: int) -> tuple[int, int]:
        return self._cls[slot]

    def colored_degree(self, color: int, v: int) -> int:
        return int(self._cdeg[color, v])

    def degrees(self) -> np.ndarray:
        return self._cdeg.sum(axis=0)

    def multiset(self) -> tuple[tuple[int, int], ...]:
        """Canonical state encoding: sorted tuple of sorted vertex pairs."""
        out = []
        for key, count in self._mult.items():
            out.extend([key] * count)
        out.sort()
        return tuple(out)

    def self_loops(self) -> int:
        return sum(c for (a, b), c in self._mult.items() if a == b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColoredMultigraph):
            return NotImplemented
        return (
            np.array_equal(self.color, other.color)
            and +self._mult == +other._mult
        )

    __hash__ = None  # mutable

    # ---------------------------------------------------------------- mutation
    def replace(self, slot_a: int, slot_b: int, new_a: tuple[int, int], new_b: tuple[int, int],
                expect: tuple[tuple[int, int], tuple[int, int]] | None = None) -> None:
        """Rewrite two occurrences in place.

        ``expect`` holds the endpoint pairs the caller believes the slots hold;
        a mismatch raises :class:`StaleHandleError`.
        """
        if slot_a == slot_b:
            raise ValueError("a swap needs two distinct occurrences")
        old_a = self.occurrence(slot_a)
        old_b = self.occurrence(slot_b)
        if expect is not None:
            ea, eb = expect
            if pair_key(*ea) != pair_key(*old_a) or pair_key(*eb) != pair_key(*old_b):
                raise StaleHandleError(
                    f"slots {slot_a}, {slot_b} hold {old_a}, {old_b}, expected {ea}, {eb}"
                )
        for slot, old, new in ((slot_a, old_a, new_a), (slot_b, old_b, new_b)):
            self._remove_counts(*old)
            self._write(slot, *new)

    def _remove_counts(self, u: int, v: int) -> None:
        key = pair_key(u, v)
        self._mult[key] -= 1
        if self._mult[key] == 0:
            del self._mult[key]
        self._cdeg[self.color[v], u] -= 1
        self._cdeg[self.color[u], v] -= 1

    def _write(self, slot: int, u: int, v: int) -> None:
        u, v = self._orient(u, v)
        self._src[slot] = u
        self._dst[slot] = v
        self._mult[pair_key(u, v)] += 1
        self._cdeg[self.color[v], u] += 1
        self._cdeg[self.color[u], v] += 1
        key = class_key(int(self.color[u]), int(self.color[v]))
        old_key = self._cls[slot]
        if key == old_key:
            return
        # swap-remove from the old class list, fix the moved slot's back-pointer
        members = self._classes[old_key]
        i = self._pos[slot]
        last = members.pop()
        if last != slot:
            members[i] = last
            self._pos[last] = i
        new_members = self._classes.setdefault(key, [])
        self._cls[slot] = key
        self._pos[slot] = len(new_members)
        new_members.append(slot)

    # ---------------------------------------------------------------- sampling
    def sample_edge(self, rng: np.random.Generator, slots: Sequence[int] | None = None) -> int:
        """Uniform edge occurrence, from all of E or from ``slots``."""
        if slots is None:
            if self.m == 0:
                raise ValueError("graph has no edges")
            return int(rng.integers(self.m))
        return int(slots[rng.integers(len(slots))])

    def sample_class_edge_excluding(self, key: tuple[int, int], excluded: int,
                                    rng: np.random.Generator) -> int:
        """Uniform occurrence of class ``key`` other than the slot ``excluded``.

        Only the single excluded occurrence is removed from the draw; parallel
        copies of the same vertex pair stay eligible.
        """
        members = self._classes.get(class_key(*key), [])
        if self._cls[excluded] != class_key(*key):
            raise ValueError(f"slot {excluded} is not in class {key}")
        size = len(members)
        if size < 2:
            raise ValueError(f"class {key} has {size} occurrence(s); need at least 2")
        j = int(rng.integers(size - 1))
        if j >= self._pos[excluded]:
            j += 1
        return members[j]

    # ------------------------------------------------------------- consistency
    def check_consistency(self) -> None:
        """Recompute every index from the slot list and compare."""
        fresh = ColoredMultigraph(self.color, self.edges(), self.vertex_names, self.color_names)
        assert +fresh._mult == +self._mult, "multiplicity index out of sync"
        assert np.array_equal(fresh._cdeg, self._cdeg), "colored degrees out of sync"
        for key, members in self._classes.items():
            for i, slot in enumerate(members):
                assert self._cls[slot] == key and self._pos[slot] == i, "class back-pointer broken"
                u, v = self.occurrence(slot)
                assert class_key(int(self.color[u]), int(self.color[v])) == key
        assert sum(len(v) for v in self._classes.values()) == self.m


# ---------------------------------------------------------------------- matrices
def cdm(g: ColoredMultigraph) -> np.ndarray:
    """Colored degree matrix, shape ``(n_colors, n)``.

    Entry ``[l, v]`` counts the neighbors of ``v`` with color ``l`` with
    multiplicity; a self-loop at ``v`` adds 2 to ``[c(v), v]``.
    """
    return g._cdeg.copy()


def jcm(g: ColoredMultigraph, C: np.ndarray | None = None) -> np.ndarray:
    """Joint color matrix derived from the colored degree matrix.

    ``J[l, l]`` is the number of monochromatic edges of color ``l`` and
    ``J[l, r]`` the number of edges joining colors ``l`` and ``r``.
    """
    if C is None:
        C = g._cdeg
    k = g.n_colors
    J = np.zeros((k, k), dtype=np.int64)
    for r in range(k):
        J[:, r] = C[:, g.color == r].sum(axis=1)
    diag = np.diag(J).copy()
    if np.any(diag % 2):
        raise ValueError("colored degree matrix has an odd monochromatic total")
    J[np.diag_indices(k)] = diag // 2
    return J


# --------------------------------------------------------------------------- io
def _open_text(source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    return io.StringIO("".join(source) if not isinstance(source, str) else source)


def _rows(source, what: str):
    handle = _open_text(source)
    try:
        for lineno, line in enumerate(handle, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split("\t") if "\t" in text else text.split()
            if len(parts) != 2 or not all(parts):
                raise GraphFormatError(f"{what} line {lineno}: expected two fields, got {line!r}")
            yield lineno, parts[0].strip(), parts[1].strip()
    finally:
        if handle is not source:
            handle.close()


def load_graph(node_color_source, edge_list_source) -> ColoredMultigraph:
    """Read a node-color file and an edge file into a :class:`ColoredMultigraph`.

    Both files hold two tab-separated fields per line (``vertex<TAB>color`` and
    ``u<TAB>v``); ``#`` lines are comments.  Vertex and color labels are
    interned to dense ids in order of first appearance.  Sources may be paths
    or open text handles.
    """
    vid: dict[str, int] = {}
    cid: dict[str, int] = {}
    colors: list[int] = []
    for lineno, name, color in _rows(node_color_source, "color file"):
        if name in vid:
            raise GraphFormatError(f"color file line {lineno}: vertex {name!r} listed twice")
        vid[name] = len(colors)
        colors.append(cid.setdefault(color, len(cid)))
    edges = []
    for lineno, a, b in _rows(edge_list_source, "edge file"):
        try:
            edges.append((vid[a], vid[b]))
        except KeyError as exc:
            raise GraphFormatError(
                f"edge file line {lineno}: unknown vertex {exc.args[0]!r}"
            ) from None
    if not edges:
        raise GraphFormatError("edge file contains no edges")
    return ColoredMultigraph(colors, edges, vertex_names=list(vid), color_names=list(cid))


def write_edges(g: ColoredMultigraph, dest) -> None:
    """Write the edge list sorted canonically, one line per occurrence."""
    names = g.vertex_names
    lines = [f"{names[a]}\t{names[b]}\n" for a, b in g.multiset()]
    _write_lines(dest, lines)


def write_colors(g: ColoredMultigraph, dest) -> None:
    lines = [f"{name}\t{g.color_names[c]}\n" for name, c in zip(g.vertex_names, g.color)]
    _write_lines(dest, lines)


def _write_lines(dest, lines):
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
    else:
        dest.writelines(lines)


@dataclass(frozen=True)
class GraphArrays:
    """Flat snapshot consumed by the compiled chain kernels.

    Slots are grouped by color class; classes with at least two occurrences
    come first and occupy ``[0, n_active)``.
    """

    src: np.ndarray
    dst: np.ndarray
    class_start: np.ndarray   # per slot
    class_size: np.ndarray    # per slot
    color: np.ndarray
    n_active: int


def to_arrays(g: ColoredMultigraph) -> GraphArrays:
    keys = sorted(g._classes, key=lambda k: (len(g._classes[k]) < 2, k))
    src, dst, start, size = [], [], [], []
    n_active = 0
    for key in keys:
        members = g._classes[key]
        if not members:
            continue
        s = len(src)
        for slot in members:
            src.append(g._src[slot])
            dst.append(g._dst[slot])
            start.append(s)
            size.append(len(members))
        if len(members) >= 2:
            n_active = len(src)
    as64 = lambda x: np.asarray(x, dtype=np.int64)
    return GraphArrays(as64(src), as64(dst), as64(start), as64(size), g.color.copy(), n_active)


def from_arrays(template: ColoredMultigraph, src: np.ndarray, dst: np.ndarray) -> ColoredMultigraph:
    return ColoredMultigraph(
        template.color, zip(src.tolist(), dst.tolist()),
        template.vertex_names, template.color_names,
    )
