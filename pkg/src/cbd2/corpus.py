"""Canonical systems and structural transforms.

Generators: cyclic systems (and the PR box), the four-content example
shape, and the 18-connection Kochen-Specker incidence structure.
Transforms: dichotomization of a categorical content into binary ones and
coarse-graining (lumping values of a connection).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidPartition, InvalidRank, InvalidSplit, UnknownContent
from .model import Bunch, CCSystem, Cell, Distribution, ValueSet, make_system

BINARY = (1, 2)


@dataclass(frozen=True)
class Skeleton:
    """Incidence structure only: which contents each context measures."""

    contents: tuple
    layout: tuple  # ((context, (content, ...)), ...)

    @property
    def contexts(self) -> tuple:
        return tuple(ctx for ctx, _ in self.layout)

    @property
    def cells(self) -> list[Cell]:
        return [Cell(q, ctx) for ctx, qs in self.layout for q in qs]

    def contexts_of(self, content: str) -> list[str]:
        return [ctx for ctx, qs in self.layout if content in qs]

    def attach(self, pmfs: Mapping[str, Mapping] | Sequence[Mapping],
               value_sets: Mapping[str, Sequence] | None = None) -> CCSystem:
        """Attach one bunch pmf per context (by context id or in layout order)."""
        if not isinstance(pmfs, Mapping):
            pmfs = dict(zip(self.contexts, pmfs))
        vs = value_sets or {q: BINARY for q in self.contents}
        return make_system(vs, [(ctx, qs, pmfs[ctx]) for ctx, qs in self.layout],
                           contents=self.contents)

    def random_system(self, rng: random.Random, max_weight: int = 6,
                      value_sets: Mapping[str, Sequence] | None = None) -> CCSystem:
        vs = value_sets or {q: BINARY for q in self.contents}
        pmfs = {ctx: random_pmf(list(itertools.product(*(vs[q] for q in qs))), rng, max_weight)
                for ctx, qs in self.layout}
        return self.attach(pmfs, vs)


def random_pmf(outcomes: Sequence[tuple], rng: random.Random, max_weight: int = 6) -> dict:
    """Random rational pmf: integer weights in ``0..max_weight``, normalized."""
    while True:
        weights = [rng.randint(0, max_weight) for _ in outcomes]
        total = sum(weights)
        if total:
            return {o: Fraction(w, total) for o, w in zip(outcomes, weights) if w}


# -- cyclic systems -----------------------------------------------------------

def cyclic_skeleton(rank: int) -> Skeleton:
    if rank < 2:
        raise InvalidRank(f"cyclic rank must be >= 2, got {rank}")
    contents = tuple(f"q{i}" for i in range(1, rank + 1))
    layout = tuple((f"c{i}", (contents[i - 1], contents[i % rank])) for i in range(1, rank + 1))
    return Skeleton(contents, layout)


@dataclass(frozen=True)
class CyclicSpec:
    rank: int
    bunch_dists: tuple  # bunch i is a pmf over (q_i, q_{i+1 mod n}) with values 1, 2

    def __post_init__(self):
        object.__setattr__(self, "bunch_dists", tuple(self.bunch_dists))


def gen_cyclic(spec: CyclicSpec) -> CCSystem:
    skel = cyclic_skeleton(spec.rank)
    if len(spec.bunch_dists) != spec.rank:
        raise InvalidRank(f"rank {spec.rank} needs {spec.rank} bunches, got {len(spec.bunch_dists)}")
    return skel.attach(list(spec.bunch_dists))


def correlated_pair(p_equal, p_first=Fraction(1, 2), p_second=Fraction(1, 2)) -> dict:
    """Binary pair pmf with given ``Pr[first=1]``, ``Pr[second=1]`` and ``Pr[equal]``."""
    p_equal, a, b = Fraction(p_equal), Fraction(p_first), Fraction(p_second)
    # Pr[11] - Pr[22] = a + b - 1 and Pr[11] + Pr[22] = p_equal.
    p11 = (p_equal + a + b - 1) / 2
    pmf = {(1, 1): p11, (1, 2): a - p11, (2, 1): b - p11, (2, 2): p_equal - p11}
    if any(v < 0 for v in pmf.values()):
        raise ValueError("no binary pair has these marginals and equality probability")
    return {o: m for o, m in pmf.items() if m}


def prbox() -> CCSystem:
    """Rank-4 cyclic PR box: equal in three contexts, opposite in the fourth."""
    half = Fraction(1, 2)
    same = {(1, 1): half, (2, 2): half}
    diff = {(1, 2): half, (2, 1): half}
    return gen_cyclic(CyclicSpec(4, (same, same, same, diff)))


# -- the four-content example shape -------------------------------------------

def rex_skeleton() -> Skeleton:
    contents = ("q1", "q2", "q3", "q4")
    layout = (("c1", ("q1", "q2", "q4")), ("c2", ("q1", "q3")), ("c3", ("q1", "q2", "q3", "q4")))
    return Skeleton(contents, layout)


def rex_shape(pmfs: Mapping[str, Mapping] | None = None, seed: int = 0) -> CCSystem:
    skel = rex_skeleton()
    if pmfs is None:
        return skel.random_system(random.Random(seed))
    return skel.attach(pmfs)


# -- Kochen-Specker 18-ray structure ------------------------------------------

_CEA18_ROWS = (
    ("q0001", (1, 2)), ("q0010", (1, 5)), ("q1100", (1, 3)), ("q1200", (1, 7)),
    ("q0100", (2, 5)), ("q1010", (2, 8)), ("q1020", (2, 4)), ("q1212", (3, 4)),
    ("q1221", (3, 6)), ("q0011", (3, 7)), ("q1111", (4, 6)), ("q0102", (4, 8)),
    ("q1001", (5, 9)), ("q1002", (5, 6)), ("q0120", (6, 9)), ("q1121", (7, 8)),
    ("q1112", (7, 9)), ("q2111", (8, 9)),
)


def gen_cea18() -> Skeleton:
    """9 contexts of 4 binary contents each; every content sits in 2 contexts."""
    contents = tuple(q for q, _ in _CEA18_ROWS)
    layout = tuple(
        (f"c{i}", tuple(q for q, ctxs in _CEA18_ROWS if i in ctxs)) for i in range(1, 10))
    return Skeleton(contents, layout)


# -- transforms -----------------------------------------------------------------

@dataclass(frozen=True)
class DichotomizationMap:
    content: str
    splits: tuple | None = None  # each split: a collection of labels; None = all splits


def all_splits(vs: ValueSet) -> list[tuple]:
    """Every unordered two-block split, named by the block holding the first label."""
    first, rest = vs.labels[0], vs.labels[1:]
    out = []
    for r in range(0, len(rest)):
        for combo in itertools.combinations(rest, r):
            out.append((first,) + combo)
    out.sort(key=lambda side: [vs.index(v) for v in side])
    return out


def _canonical_split(vs: ValueSet, split: Iterable) -> tuple:
    side = set(split)
    if not side or not side <= set(vs.labels) or side == set(vs.labels):
        raise InvalidSplit(f"split {sorted(map(str, side))} is not a nonempty proper subset")
    if vs.labels[0] not in side:
        side = set(vs.labels) - side
    return tuple(v for v in vs.labels if v in side)


def _replace_content(system: CCSystem, content: str, new_contents: Sequence[str],
                     new_value_sets: Mapping[str, ValueSet], transform) -> CCSystem:
    """Replace every cell of ``content`` by cells of ``new_contents``.

    ``transform(value)`` gives the tuple of new values for one old value.
    """
    contents = []
    for q in system.contents:
        contents.extend(new_contents if q == content else [q])
    value_sets = {}
    for q in system.contents:
        if q == content:
            value_sets.update(new_value_sets)
        else:
            value_sets[q] = system.value_sets[q]
    bunches = []
    for b in system.bunches:
        if content not in b.contents:
            bunches.append(b)
            continue
        pos = b.contents.index(content)
        cells = list(b.cells[:pos]) + [Cell(q, b.context) for q in new_contents] + \
            list(b.cells[pos + 1:])
        pmf: dict = {}
        for outcome, mass in b.dist.pmf.items():
            new = outcome[:pos] + tuple(transform(outcome[pos])) + outcome[pos + 1:]
            pmf[new] = pmf.get(new, Fraction(0)) + mass
        bunches.append(Bunch(b.context, Distribution(cells, pmf)))
    return CCSystem(tuple(contents), system.contexts, value_sets, tuple(bunches))


def dichotomize(system: CCSystem, dmap: DichotomizationMap) -> CCSystem:
    """Replace a content by jointly distributed binary indicators of its splits.

    New variables take value 1 when the original value lies in the split's
    named block and 2 otherwise.  A single split keeps the content's name.
    """
    q = dmap.content
    if q not in system.contents:
        raise UnknownContent(q)
    vs = system.value_sets[q]
    if len(vs) < 2:
        raise InvalidSplit(f"content {q} has a single value and cannot be split")
    if dmap.splits is None:
        sides = all_splits(vs)
    else:
        sides = [_canonical_split(vs, s) for s in dmap.splits]
        if len(set(sides)) != len(sides):
            raise InvalidSplit("splits repeat (a split and its complement are the same split)")
    if len(sides) == 1:
        names = [q]
    else:
        names = [f"{q}[{','.join(str(v) for v in side)}]" for side in sides]
        clash = [n for n in names if n in system.contents]
        if clash:
            raise InvalidSplit(f"new content names collide with existing ones: {clash}")
    new_vs = {n: ValueSet(BINARY) for n in names}
    side_sets = [set(s) for s in sides]
    return _replace_content(system, q, names, new_vs,
                            lambda v: tuple(1 if v in s else 2 for s in side_sets))


def coarse_grain(system: CCSystem, content: str, lump: Sequence[Iterable]) -> CCSystem:
    """Lump values of ``content`` across its whole connection.

    ``lump`` partitions the value set; each block is relabeled by its member
    that comes first in the value-set order.
    """
    if content not in system.contents:
        raise UnknownContent(content)
    vs = system.value_sets[content]
    blocks = [list(b) for b in lump]
    flat = [v for b in blocks for v in b]
    if any(not b for b in blocks):
        raise InvalidPartition("empty block")
    if len(flat) != len(set(flat)) or set(flat) != set(vs.labels) or len(flat) != len(vs):
        raise InvalidPartition(f"blocks {blocks} do not partition {list(vs.labels)}")
    blocks.sort(key=lambda b: min(vs.index(v) for v in b))
    label_of = {}
    labels = []
    for b in blocks:
        head = min(b, key=vs.index)
        labels.append(head)
        for v in b:
            label_of[v] = head
    return _replace_content(system, content, [content], {content: ValueSet(tuple(labels))},
                            lambda v: (label_of[v],))
