"""ConteXt-conteNt systems: value sets, cells, bunch distributions, connections.

Every probability is a :class:`fractions.Fraction`.  Objects are built raw
(no checks) and become trustworthy only after :func:`validate_system`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Mapping, NamedTuple, Sequence, Union

from .errors import ParseError, UnknownCell, UnknownContent, ValidationError

Label = Union[str, int]


def to_fraction(x: Any) -> Fraction:
    """Convert ``x`` to an exact Fraction.

    Strings may be integers, ``p/q`` or decimals (``"0.25"`` is exactly 1/4).
    Floats are read through their shortest repr, so ``0.1`` means 1/10.
    """
    if isinstance(x, bool):
        raise ParseError(f"not a probability: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed rational {x!r}") from exc
    raise ParseError(f"not a probability: {x!r}")


def format_fraction(q: Fraction) -> str:
    return str(Fraction(q))


@dataclass(frozen=True)
class ValueSet:
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label) -> int:
        return self.labels.index(label)

    @property
    def is_binary(self) -> bool:
        return len(self.labels) == 2


@dataclass(frozen=True, order=True)
class Cell:
    content: str
    context: str

    def __str__(self):
        return f"{self.content}@{self.context}"

    @classmethod
    def parse(cls, text: str) -> "Cell":
        content, sep, context = text.rpartition("@")
        if not sep or not content or not context:
            raise ParseError(f"cell must look like content@context, got {text!r}")
        return cls(content, context)


class Distribution:
    """A finitely supported joint distribution over an ordered tuple of cells.

    ``outcomes`` and ``masses`` keep the raw listing (duplicates and zero
    masses included) so that validation can report them; equality and
    :attr:`pmf` only look at the merged nonzero masses.
    """

    __slots__ = ("cells", "outcomes", "masses", "_pmf")

    def __init__(self, cells: Iterable[Cell], items: Mapping | Iterable[tuple[tuple, Any]]):
        self.cells = tuple(cells)
        pairs = items.items() if isinstance(items, Mapping) else items
        outcomes, masses = [], []
        for outcome, mass in pairs:
            outcomes.append(tuple(outcome))
            masses.append(to_fraction(mass))
        self.outcomes = tuple(outcomes)
        self.masses = tuple(masses)
        self._pmf = None

    @property
    def pmf(self) -> dict[tuple, Fraction]:
        if self._pmf is None:
            merged: dict[tuple, Fraction] = {}
            for o, m in zip(self.outcomes, self.masses):
                merged[o] = merged.get(o, Fraction(0)) + m
            self._pmf = {o: m for o, m in merged.items() if m != 0}
        return self._pmf

    def prob(self, outcome: Sequence) -> Fraction:
        return self.pmf.get(tuple(outcome), Fraction(0))

    def items(self):
        return self.pmf.items()

    def total(self) -> Fraction:
        return sum(self.masses, Fraction(0))

    def __len__(self):
        return len(self.pmf)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.cells == other.cells and self.pmf == other.pmf

    def __hash__(self):
        return hash((self.cells, frozenset(self.pmf.items())))

    def __repr__(self):
        body = ", ".join(f"{o}: {m}" for o, m in self.pmf.items())
        return f"Distribution({[str(c) for c in self.cells]}, {{{body}}})"


def marginal(dist: Distribution, cells: Sequence[Cell]) -> Distribution:
    """Exact marginal of ``dist`` onto ``cells`` (in the order given)."""
    try:
        positions = [dist.cells.index(c) for c in cells]
    except ValueError:
        missing = next(c for c in cells if c not in dist.cells)
        raise UnknownCell(missing) from None
    out: dict[tuple, Fraction] = {}
    for outcome, mass in dist.pmf.items():
        key = tuple(outcome[p] for p in positions)
        out[key] = out.get(key, Fraction(0)) + mass
    return Distribution(cells, out)


@dataclass(frozen=True)
class Bunch:
    context: str
    dist: Distribution
    # Per-cell value sets declared by the input, if any; checked against the
    # system-level value set of each content during validation.
    declared_values: Mapping[str, ValueSet] | None = field(default=None, compare=False)

    @property
    def cells(self) -> tuple[Cell, ...]:
        return self.dist.cells

    @property
    def contents(self) -> tuple[str, ...]:
        return tuple(c.content for c in self.dist.cells)


@dataclass(frozen=True)
class CCSystem:
    contents: tuple
    contexts: tuple
    value_sets: Mapping[str, ValueSet]
    bunches: tuple

    def __post_init__(self):
        object.__setattr__(self, "contents", tuple(self.contents))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "bunches", tuple(self.bunches))
        object.__setattr__(self, "value_sets", dict(self.value_sets))

    def __hash__(self):
        return hash((self.contents, self.contexts, self.bunches))

    def bunch(self, context: str) -> Bunch:
        for b in self.bunches:
            if b.context == context:
                return b
        raise KeyError(context)

    @property
    def cells(self) -> tuple[Cell, ...]:
        """All cells, context by context in bunch order."""
        return tuple(c for b in self.bunches for c in b.cells)

    def contexts_of(self, content: str) -> list[str]:
        return [b.context for b in self.bunches if content in b.contents]

    def value_set(self, cell_or_content: Cell | str) -> ValueSet:
        key = cell_or_content.content if isinstance(cell_or_content, Cell) else cell_or_content
        return self.value_sets[key]

    def is_binary(self) -> bool:
        return all(len(self.value_sets[q]) == 2 for q in self.contents)


@dataclass(frozen=True)
class Connection:
    content: str
    value_set: ValueSet
    cells: tuple
    marginals: tuple

    def probabilities(self, i: int) -> list[Fraction]:
        """Masses of the i-th member in value-set order."""
        m = self.marginals[i]
        return [m.prob((v,)) for v in self.value_set]

    @property
    def trivial(self) -> bool:
        return len(self.cells) == 1


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    context: str | None = None
    content: str | None = None

    def __str__(self):
        where = []
        if self.content is not None:
            where.append(f"content={self.content}")
        if self.context is not None:
            where.append(f"context={self.context}")
        loc = f" [{', '.join(where)}]" if where else ""
        return f"{self.kind}{loc}: {self.message}"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message,
                "context": self.context, "content": self.content}


def find_violations(raw: CCSystem) -> list[Violation]:
    """Every invariant violation in ``raw``; empty means the system is valid."""
    out: list[Violation] = []
    add = lambda *a, **k: out.append(Violation(*a, **k))  # noqa: E731

    for q, vs in raw.value_sets.items():
        if len(vs) < 1:
            add("BadValueSet", "value set is empty", content=q)
        if len(set(vs.labels)) != len(vs.labels):
            add("BadValueSet", f"duplicate labels in {list(vs.labels)}", content=q)
    if len(set(raw.contents)) != len(raw.contents):
        add("DuplicateContent", "contents are not distinct")
    for q in raw.contents:
        if q not in raw.value_sets:
            add("MissingValueSet", "no value set given", content=q)

    seen_ctx: dict[str, int] = {}
    for b in raw.bunches:
        seen_ctx[b.context] = seen_ctx.get(b.context, 0) + 1
    for c in raw.contexts:
        n = seen_ctx.get(c, 0)
        if n == 0:
            add("MissingBunch", "context has no bunch", context=c)
        elif n > 1:
            add("DuplicateContext", f"context has {n} bunches", context=c)
    if len(set(raw.contexts)) != len(raw.contexts):
        add("DuplicateContext", "contexts are not distinct")
    for c in seen_ctx:
        if c not in raw.contexts:
            add("UnknownContext", "bunch for an undeclared context", context=c)

    for b in raw.bunches:
        ctx = b.context
        seen_cells = set()
        for cell in b.cells:
            if cell.context != ctx:
                add("ContextMismatch", f"cell {cell} listed in bunch {ctx}", context=ctx,
                    content=cell.content)
            if cell in seen_cells:
                add("DuplicateCell", f"cell {cell} appears twice", context=ctx,
                    content=cell.content)
            seen_cells.add(cell)
            if cell.content not in raw.contents:
                add("UnknownContent", f"cell {cell} has an undeclared content", context=ctx,
                    content=cell.content)
        if b.declared_values:
            for q, vs in b.declared_values.items():
                expected = raw.value_sets.get(q)
                if expected is not None and tuple(vs.labels) != tuple(expected.labels):
                    add("ValueSetMismatch",
                        f"values {list(vs.labels)} differ from the connection's "
                        f"{list(expected.labels)}", context=ctx, content=q)
        _distribution_violations(raw, b, add)

    measured = {cell.content for b in raw.bunches for cell in b.cells}
    for q in raw.contents:
        if q not in measured:
            add("EmptyConnection", "content is measured in no context", content=q)
    return out


def _distribution_violations(raw: CCSystem, b: Bunch, add) -> None:
    ctx = b.context
    d = b.dist
    n = len(d.cells)
    seen = set()
    for outcome, mass in zip(d.outcomes, d.masses):
        if len(outcome) != n:
            add("MalformedOutcome", f"outcome {outcome} has {len(outcome)} values for {n} cells",
                context=ctx)
            continue
        if outcome in seen:
            add("DuplicateOutcome", f"outcome {outcome} listed twice", context=ctx)
        seen.add(outcome)
        if mass < 0:
            add("NegativeMass", f"outcome {outcome} has mass {mass}", context=ctx)
        for cell, v in zip(d.cells, outcome):
            vs = raw.value_sets.get(cell.content)
            if vs is not None and v not in vs:
                add("ValueSetMismatch", f"value {v!r} is not in {list(vs.labels)}",
                    context=ctx, content=cell.content)
    total = d.total()
    if total != 1:
        add("NonNormalized", f"masses sum to {total}", context=ctx)


def validate_system(raw: CCSystem) -> CCSystem:
    """Return ``raw`` unchanged if valid, else raise ValidationError with all violations."""
    violations = find_violations(raw)
    if violations:
        raise ValidationError(violations)
    return raw


def connection_of(system: CCSystem, content: str) -> Connection:
    if content not in system.contents:
        raise UnknownContent(content)
    cells, marginals = [], []
    for b in system.bunches:
        for cell in b.cells:
            if cell.content == content:
                cells.append(cell)
                marginals.append(marginal(b.dist, [cell]))
    return Connection(content, system.value_sets[content], tuple(cells), tuple(marginals))


def connections(system: CCSystem) -> list[Connection]:
    return [connection_of(system, q) for q in system.contents]


class ConsistencyReport(NamedTuple):
    consistent: bool
    offending: list


def is_consistently_connected(system: CCSystem) -> ConsistencyReport:
    offending = []
    for q in system.contents:
        conn = connection_of(system, q)
        first = conn.marginals[0].pmf
        if any(m.pmf != first for m in conn.marginals[1:]):
            offending.append(q)
    return ConsistencyReport(not offending, offending)


def make_system(value_sets: Mapping[str, Iterable[Label]],
                bunches: Iterable[tuple[str, Sequence[str], Mapping]],
                contents: Sequence[str] | None = None) -> CCSystem:
    """Convenience constructor.

    ``bunches`` is a sequence of ``(context, contents, pmf)`` where ``pmf``
    maps outcome tuples (one value per listed content) to masses.  Contents
    default to first-appearance order.  The result is not validated.
    """
    bunch_list = []
    order: list[str] = []
    for ctx, qs, pmf in bunches:
        for q in qs:
            if q not in order:
                order.append(q)
        cells = [Cell(q, ctx) for q in qs]
        bunch_list.append(Bunch(ctx, Distribution(cells, pmf)))
    if contents is None:
        contents = order
    vs = {q: ValueSet(tuple(v)) for q, v in value_sets.items()}
    return CCSystem(tuple(contents), tuple(b.context for b in bunch_list), vs, tuple(bunch_list))


def product_outcomes(value_sets: Sequence[ValueSet]):
    """Canonical outcome enumeration: value-set order, last coordinate fastest."""
    return itertools.product(*(vs.labels for vs in value_sets))
