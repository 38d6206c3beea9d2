"""Double edge swap classification and Metropolis-Hastings proposal ratios.

A proposal is a pair of edge occurrences with an explicit orientation
``(u, v), (x, y)``; the swap always replaces them with ``(u, x), (v, y)``.
The second orientation of the swap is reached by flipping ``(u, v)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .graph import ColoredMultigraph, pair_key


class SwapKind(enum.Enum):
    CHANGING_CDES = "changing_cdes"
    NON_CHANGING = "non_changing"
    OUT_OF_SPACE = "out_of_space"
    SKIPPED = "skipped"
    # degree-preserving but not color-checked; only produced for the plain CM chain
    CHANGING_DES = "changing_des"


@dataclass(frozen=True)
class SwapProposal:
    slots: tuple[int, int]
    source: tuple[tuple[int, int], tuple[int, int]]
    kind: SwapKind
    rho: float | Fraction | None = None

    @property
    def targets(self) -> tuple[tuple[int, int], tuple[int, int]]:
        (u, v), (x, y) = self.source
        return (u, x), (v, y)

    @property
    def changing(self) -> bool:
        return self.kind in (SwapKind.CHANGING_CDES, SwapKind.CHANGING_DES)


def is_non_changing(u: int, v: int, x: int, y: int) -> bool:
    a, b = pair_key(u, v), pair_key(x, y)
    c, d = pair_key(u, x), pair_key(v, y)
    return (a == c and b == d) or (a == d and b == c)


def color_compatible(g: ColoredMultigraph, u: int, v: int, x: int, y: int) -> bool:
    """Whether ``<(u,v),(x,y)> -> <(u,x),(v,y)>`` keeps every colored degree.

    This is the pairing rule: the color sets of both edges agree and, for
    bichromatic edges, ``x`` takes over the color role of ``v``.
    """
    c = g.color
    return c[x] == c[v] and c[y] == c[u]


def classify(g: ColoredMultigraph, source, check_colors: bool = True) -> SwapKind:
    """Classify the oriented swap ``source = ((u, v), (x, y))``."""
    (u, v), (x, y) = source
    if check_colors and not color_compatible(g, u, v, x, y):
        return SwapKind.OUT_OF_SPACE
    k = len({u, v, x, y})
    loops = (u == v) + (x == y)
    if k == 1 or (k == 2 and loops == 1):
        return SwapKind.SKIPPED
    if is_non_changing(u, v, x, y):
        return SwapKind.NON_CHANGING
    return SwapKind.CHANGING_CDES if check_colors else SwapKind.CHANGING_DES


def compute_rho(g: ColoredMultigraph, source, exact: bool = False):
    """Proposal ratio of a changing swap, read from current multiplicities.

    Counts the ordered occurrence pairs (with orientation coin) that lead back
    from the swapped graph versus those leading forward.
    """
    (u, v), (x, y) = source
    w = g.multiplicity
    num = lambda a, b: (Fraction(a) / Fraction(b)) if exact else a / b
    k = len({u, v, x, y})
    loops = (u == v) + (x == y)
    if k == 4:
        return num((w(u, x) + 1) * (w(v, y) + 1), w(u, v) * w(x, y))
    if k == 3:
        base_n = (w(u, x) + 1) * (w(v, y) + 1)
        base_d = w(u, v) * w(x, y)
        if loops:
            return num(base_n, 2 * base_d)
        return num(2 * base_n, base_d)
    if k == 2:
        if loops == 2:
            wux = w(u, x)
            return num((wux + 2) * (wux + 1), 4 * w(u, u) * w(x, x))
        if loops == 0:
            wuv = w(u, v)
            assert wuv >= 2, "parallel swap needs two copies of the edge"
            return num(4 * (w(u, u) + 1) * (w(v, v) + 1), wuv * (wuv - 1))
    raise ValueError(f"no proposal ratio for swap {source}")


def propose(g: ColoredMultigraph, slot_a: int, slot_b: int, flip: bool,
            check_colors: bool = True, exact: bool = False) -> SwapProposal:
    """Build and classify the swap on two occurrences.

    ``flip`` reverses the stored orientation of the first occurrence.
    """
    if slot_a == slot_b:
        raise ValueError("a swap needs two distinct occurrences")
    u, v = g.occurrence(slot_a)
    x, y = g.occurrence(slot_b)
    if flip:
        u, v = v, u
    source = ((u, v), (x, y))
    kind = classify(g, source, check_colors)
    rho = compute_rho(g, source, exact) if kind in (SwapKind.CHANGING_CDES, SwapKind.CHANGING_DES) else None
    return SwapProposal((slot_a, slot_b), source, kind, rho)


def apply_swap(g: ColoredMultigraph, proposal: SwapProposal) -> None:
    """Apply a proposal in place; raises if its occurrences went stale."""
    a, b = proposal.slots
    new_a, new_b = proposal.targets
    g.replace(a, b, new_a, new_b, expect=proposal.source)


def reverse(g: ColoredMultigraph, proposal: SwapProposal) -> SwapProposal:
    """Proposal undoing ``proposal`` once it has been applied to ``g``."""
    (u, v), (x, y) = proposal.source
    # after the swap the slots hold (u, x) and (v, y); swapping x<->v restores them
    source = ((u, x), (v, y))
    kind = classify(g, source, proposal.kind is not SwapKind.CHANGING_DES)
    return SwapProposal(proposal.slots, source, kind)
