"""JSON and CSV encodings of run results.

JSON value encoding: unit is ``null``, pairs are two-element lists, the
infinite duration is the string ``"inf"``; everything else is the plain
JSON scalar. Floats are written with ``repr`` precision, so re-reading a
report reproduces every number bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from ..duration import Diverge, Done
from ..hybrid import Undefined
from ..opsem import Converged, Diverged
from ..prim import eval_value, flatten_value

SCHEMA_KEYS = ("program", "semantics", "outcome", "params", "mismatches")


def encode_value(val: Any) -> Any:
    if isinstance(val, tuple):
        if len(val) == 0:
            return None
        return [encode_value(val[0]), encode_value(val[1])]
    return val


def decode_value(obj: Any) -> Any:
    if obj is None:
        return ()
    if isinstance(obj, list):
        if len(obj) != 2:
            raise ValueError(f"pairs are encoded as two-element lists, got {obj!r}")
        return (decode_value(obj[0]), decode_value(obj[1]))
    return obj


def encode_duration(d: float) -> float | str:
    return "inf" if math.isinf(d) else d


def decode_duration(obj: float | str) -> float:
    if obj == "inf":
        return math.inf
    return float(obj)


def outcome_json(result: Any, taxonomy: str | None = None) -> dict:
    """Encode a big-step outcome or a duration-monad result."""
    match result:
        case Converged(dur, val):
            out = {"kind": "converged", "duration": encode_duration(dur), "value": encode_value(eval_value({}, val))}
        case Done(dur, val):
            out = {"kind": "converged", "duration": encode_duration(dur), "value": encode_value(val)}
        case Diverged(dur, kind):
            out = {"kind": "diverged", "duration": encode_duration(dur), "divergence": kind}
        case Diverge(dur, exhausted):
            out = {"kind": "diverged", "duration": encode_duration(dur)}
            if exhausted:
                out["divergence"] = "exhausted"
        case _:
            raise TypeError(f"cannot encode {result!r}")
    if taxonomy is not None:
        out["taxonomy"] = taxonomy
    return out


def make_report(program: str, semantics: str, outcome: dict, params: dict, mismatches: Sequence[str] = ()) -> dict:
    return {
        "program": program,
        "semantics": semantics,
        "outcome": outcome,
        "params": params,
        "mismatches": list(mismatches),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False)


def loads(text: str) -> dict:
    report = json.loads(text)
    missing = [k for k in SCHEMA_KEYS if k not in report]
    if missing:
        raise ValueError(f"report lacks keys: {', '.join(missing)}")
    return report


# ----------------------------------------------------------------------- CSV


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v == ():
        return "*"
    if isinstance(v, float):
        return "inf" if v == math.inf else ("-inf" if v == -math.inf else repr(v))
    return str(v)


def _parse_cell(text: str) -> Any:
    if text == "true":
        return True
    if text == "false":
        return False
    if text == "*":
        return ()
    if any(c in text for c in ".eEn") or text in ("inf", "-inf"):
        return float(text)
    return int(text)


def write_csv(rows: Iterable[tuple[float, Any]], out: io.TextIOBase | None = None) -> str:
    """Write ``(t, value-or-Undefined)`` rows. Columns come from the first
    defined value; undefined points leave the value cells empty."""
    rows = list(rows)
    template = next((v for _, v in rows if not isinstance(v, Undefined)), None)
    names = [name for name, _ in flatten_value(template)] if template is not None else ["v"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + names)
    for t, v in rows:
        if isinstance(v, Undefined):
            writer.writerow([_cell(float(t))] + [""] * len(names))
        else:
            writer.writerow([_cell(float(t))] + [_cell(x) for _, x in flatten_value(v)])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def read_csv(text: str) -> list[tuple[float, Any]]:
    """Inverse of :func:`write_csv`; undefined points come back as None."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    names = header[1:]
    rows = []
    for record in reader:
        t = float(record[0])
        cells = record[1:]
        if all(c == "" for c in cells):
            rows.append((t, None))
            continue
        rows.append((t, _unflatten(names, [_parse_cell(c) for c in cells])))
    return rows


def _unflatten(names: list[str], cells: list[Any]) -> Any:
    tree: dict = {}
    for name, cell in zip(names, cells):
        path = name.split(".")[1:]
        if not path:
            return cell
        node = tree
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = cell

    def build(node):
        if not isinstance(node, dict):
            return node
        return (build(node["0"]), build(node["1"]))

    return build(tree)
