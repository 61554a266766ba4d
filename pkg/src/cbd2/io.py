"""JSON reading and writing for systems, couplings and reports.

Masses are written as exact ``p/q`` strings with a ``~``-prefixed decimal
twin for human readers; the decimal twin is ignored on input.  Output uses
sorted keys so the same object always serializes to the same bytes.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .model import Bunch, CCSystem, Cell, Distribution, ValueSet, product_outcomes, to_fraction

DECIMAL_DIGITS = 12


def approx(q: Fraction) -> float:
    return round(float(q), DECIMAL_DIGITS)


def rational_fields(key: str, q: Fraction | None) -> dict:
    """``{key: "p/q", "~key": decimal}``, or an empty dict for ``None``."""
    if q is None:
        return {}
    return {key: str(Fraction(q)), "~" + key: approx(q)}


def _label(v: Any):
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ParseError(f"value labels must be strings or integers, got {v!r}")
    return v


def _loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc


def _require(obj: dict, key: str, kind: type, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, kind):
        names = kind if isinstance(kind, tuple) else (kind,)
        raise ParseError(f"{where}: {key!r} must be {' or '.join(k.__name__ for k in names)}")
    return val


def system_from_obj(doc: Any) -> CCSystem:
    """Build a raw (unvalidated) system from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    contents = [str(q) for q in _require(doc, "contents", list, "system")]
    raw_vs = _require(doc, "value_sets", dict, "system")
    value_sets = {str(q): ValueSet(tuple(_label(v) for v in labels))
                  for q, labels in raw_vs.items()}
    contexts, bunches = [], []
    for i, ctx in enumerate(_require(doc, "contexts", list, "system")):
        where = f"contexts[{i}]"
        cid = str(_require(ctx, "id", (str, int), where))
        where = f"context {cid}"
        cells, declared = [], {}
        for entry in _require(ctx, "cells", list, where):
            if isinstance(entry, dict):
                q = str(_require(entry, "content", (str, int), where))
                if "values" in entry:
                    declared[q] = ValueSet(tuple(_label(v) for v in entry["values"]))
            elif isinstance(entry, (str, int)) and not isinstance(entry, bool):
                q = str(entry)
            else:
                raise ParseError(f"{where}: bad cell entry {entry!r}")
            cells.append(Cell(q, cid))
        items = []
        for j, row in enumerate(_require(ctx, "distribution", list, where)):
            out = _require(row, "outcome", dict, f"{where} outcome {j}")
            if set(out) != {c.content for c in cells}:
                raise ParseError(f"{where} outcome {j}: keys {sorted(out)} do not match cells "
                                 f"{[c.content for c in cells]}")
            if "p" not in row:
                raise ParseError(f"{where} outcome {j}: missing key 'p'")
            items.append((tuple(_label(out[c.content]) for c in cells), to_fraction(row["p"])))
        contexts.append(cid)
        bunches.append(Bunch(cid, Distribution(cells, items), declared or None))
    return CCSystem(tuple(contents), tuple(contexts), value_sets, tuple(bunches))


def parse_system(text: str) -> CCSystem:
    return system_from_obj(_loads(text))


def system_to_obj(system: CCSystem) -> dict:
    contexts = []
    for b in system.bunches:
        vss = [system.value_set(c) for c in b.cells]
        pmf = b.dist.pmf
        dist = []
        for outcome in product_outcomes(vss):
            p = pmf.get(outcome)
            if p:
                dist.append({"outcome": {c.content: v for c, v in zip(b.cells, outcome)},
                             **rational_fields("p", p)})
        contexts.append({"id": b.context, "cells": list(b.contents), "distribution": dist})
    return {
        "contents": list(system.contents),
        "value_sets": {q: list(system.value_sets[q].labels) for q in system.contents},
        "contexts": contexts,
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_system(system: CCSystem) -> str:
    return dumps(system_to_obj(system))


def distribution_to_obj(dist: Distribution) -> dict:
    """Sparse listing: cells as ``content@context`` and one entry per nonzero outcome."""
    return {
        "cells": [str(c) for c in dist.cells],
        "masses": [{"outcome": list(o), **rational_fields("p", p)}
                   for o, p in sorted(dist.pmf.items(), key=lambda kv: _sort_key(kv[0]))],
    }


def _sort_key(outcome: tuple):
    return tuple((isinstance(v, str), str(v) if isinstance(v, str) else v) for v in outcome)


def certificate_to_obj(rows) -> list:
    """``[(constraint name, multiplier)]`` as JSON rows."""
    return [{"constraint": name, **rational_fields("multiplier", y)} for name, y in rows]


def report_to_obj(report, include_measure: bool = True) -> dict:
    from .contextuality import QuasiCoupling, SystemCoupling

    obj: dict = {"verdict": report.verdict.value,
                 "lp": {"variables": report.lp_vars, "constraints": report.lp_rows}}
    if include_measure:
        obj.update(rational_fields("measure", report.measure))
        obj.update(rational_fields("total_variation", report.total_variation))
    w = report.witness
    if isinstance(w, SystemCoupling):
        obj["witness"] = {"kind": "system_coupling", **distribution_to_obj(w.dist)}
    elif isinstance(w, QuasiCoupling):
        masses = sorted(w.masses.items(), key=lambda kv: _sort_key(kv[0]))
        obj["witness"] = {"kind": "quasi_coupling", "cells": [str(c) for c in w.cells],
                          "masses": [{"outcome": list(o), **rational_fields("p", p)}
                                     for o, p in masses]}
    if report.certificate is not None:
        obj["certificate"] = certificate_to_obj(report.certificate)
    if report.notes:
        obj["notes"] = list(report.notes)
    return obj
