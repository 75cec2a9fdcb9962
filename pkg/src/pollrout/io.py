"""Instance, solution and report file formats.

Canonical instance file (line oriented, ``#`` starts a comment)::

    POLLROUT-INSTANCE 1
    NAME <name>
    FLEET <m> <capacity kg>
    PARAMS w1=<..> w2=<..> w3=<..> w4=<..> fc=<..> fd=<..> vmin=<m/s> vmax=<m/s>
    NODES <n+1>
    <id> <x m> <y m> <demand kg> <tw_start s> <tw_end s> <service s>   (n+1 rows)
    MATRIX                       (optional; n+1 rows of n+1 distances in m)
    END

PRPLIB layout (``--format prplib``), as distributed with the UK instances;
this reader assumes::

    <n customers>
    <curb weight kg> <max payload kg>
    <min speed km/h> <max speed km/h>
    <(n+1) x (n+1) distance matrix, km>
    <id> <city name> <demand kg> <ready s> <due s> <service s>   (n+1 rows)

The city name may contain spaces; the last four fields of a node row are
numeric. Coordinates are not part of that layout, so the matrix is used.
"""

from __future__ import annotations

import csv
import io as _io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, TextIO, Union

from .model import (FIXED, FREE, InputError, Instance, Node, PrpParameters, Route, Schedule,
                    Solution, route_cost, route_fuel)

MAGIC = "POLLROUT-INSTANCE"
SOL_MAGIC = "POLLROUT-SOLUTION"
VERSION = "1"
PARAM_KEYS = {"w1": "w1", "w2": "w2", "w3": "w3", "w4": "w4", "fc": "omega_fc",
              "fd": "omega_fd", "vmin": "v_min", "vmax": "v_max"}
REPORT_HEADER = ["instance", "mode", "avg_cost", "best_cost", "cpu_s", "gap_pct"]

Source = Union[str, Path, TextIO]


class ParseError(InputError):
    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col


def _read_text(src: Source) -> str:
    if hasattr(src, "read"):
        return src.read()
    return Path(src).read_text()


def _fmt(x: float) -> str:
    return repr(float(x))


class _Lines:
    """Non-blank, comment-stripped lines with their 1-based numbers."""

    def __init__(self, text: str):
        self.items = []
        for no, raw in enumerate(text.splitlines(), 1):
            body = raw.split("#", 1)[0]
            if body.strip():
                self.items.append((no, body))
        self.pos = 0

    def next(self, what: str):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise ParseError(f"unexpected end of file, expected {what}", last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def peek(self) -> Optional[str]:
        return self.items[self.pos][1].split()[0] if self.pos < len(self.items) else None


def _fields(no: int, body: str):
    """Tokens with their 1-based columns."""
    out, i = [], 0
    for tok in body.split():
        i = body.index(tok, i)
        out.append((tok, i + 1))
        i += len(tok)
    return out


def _num(tok: tuple, no: int, kind=float):
    try:
        return kind(tok[0])
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, got {tok[0]!r}", no, tok[1]) from None


def _keyword(lines: _Lines, key: str, count: Optional[int] = None):
    no, body = lines.next(key)
    toks = _fields(no, body)
    if toks[0][0] != key:
        raise ParseError(f"expected {key}, got {toks[0][0]!r}", no, toks[0][1])
    if count is not None and len(toks) - 1 != count:
        col = toks[-1][1] + len(toks[-1][0])
        raise ParseError(f"{key} needs {count} field(s), got {len(toks) - 1}", no, col)
    return no, toks[1:]


def parse_instance(src: Source, fmt: str = "canonical") -> Instance:
    if fmt == "canonical":
        return _parse_canonical(_read_text(src))
    if fmt == "prplib":
        name = Path(src).stem if isinstance(src, (str, Path)) else "prplib"
        return _parse_prplib(_read_text(src), name)
    raise InputError(f"unknown instance format {fmt!r} (canonical|prplib)")


def _parse_canonical(text: str) -> Instance:
    lines = _Lines(text)
    no, toks = _keyword(lines, MAGIC, 1)
    if toks[0][0] != VERSION:
        raise ParseError(f"unsupported version {toks[0][0]}", no, toks[0][1])
    no, toks = _keyword(lines, "NAME", 1)
    name = toks[0][0]
    no, toks = _keyword(lines, "FLEET", 2)
    m = _num(toks[0], no, int)
    cap = _num(toks[1], no)
    no, toks = _keyword(lines, "PARAMS")
    values = {}
    for tok, col in toks:
        key, eq, val = tok.partition("=")
        if not eq or key not in PARAM_KEYS:
            raise ParseError(f"bad parameter {tok!r}", no, col)
        values[PARAM_KEYS[key]] = _num((val, col + len(key) + 1), no)
    missing = set(PARAM_KEYS.values()) - set(values)
    if missing:
        raise ParseError(f"missing parameters {sorted(missing)}", no)
    try:
        params = PrpParameters(capacity_q=cap, fleet_size_m=m, **values)
    except InputError as exc:
        raise ParseError(str(exc), no) from None
    no, toks = _keyword(lines, "NODES", 1)
    count = _num(toks[0], no, int)
    nodes = []
    for _ in range(count):
        no, body = lines.next("node row")
        toks = _fields(no, body)
        if len(toks) != 7:
            col = toks[-1][1] + len(toks[-1][0])
            raise ParseError(f"node row needs 7 fields (id x y demand tw_start tw_end service), "
                             f"got {len(toks)}", no, col)
        vals = [_num(toks[0], no, int)] + [_num(t, no) for t in toks[1:]]
        try:
            nodes.append(Node(*vals))
        except InputError as exc:
            raise ParseError(str(exc), no) from None
    matrix = None
    if lines.peek() == "MATRIX":
        lines.next("MATRIX")
        matrix = []
        for _ in range(count):
            no, body = lines.next("matrix row")
            toks = _fields(no, body)
            if len(toks) != count:
                raise ParseError(f"matrix row needs {count} entries, got {len(toks)}", no)
            matrix.append([_num(t, no) for t in toks])
    no, toks = _keyword(lines, "END", 0)
    if lines.pos != len(lines.items):
        raise ParseError("content after END", lines.items[lines.pos][0])
    try:
        return Instance(name, tuple(nodes), params, matrix)
    except InputError as exc:
        raise ParseError(str(exc), no) from None


def _parse_prplib(text: str, name: str) -> Instance:
    lines = _Lines(text)
    no, body = lines.next("customer count")
    n = _num(_fields(no, body)[0], no, int)
    no, body = lines.next("curb weight and payload")
    toks = _fields(no, body)
    if len(toks) < 2:
        raise ParseError("expected curb weight and max payload", no)
    payload = _num(toks[1], no)
    no, body = lines.next("speed limits")
    toks = _fields(no, body)
    if len(toks) < 2:
        raise ParseError("expected min and max speed (km/h)", no)
    vmin, vmax = _num(toks[0], no) / 3.6, _num(toks[1], no) / 3.6
    matrix = []
    for _ in range(n + 1):
        no, body = lines.next("distance row")
        toks = _fields(no, body)
        if len(toks) != n + 1:
            raise ParseError(f"distance row needs {n + 1} entries, got {len(toks)}", no)
        matrix.append([_num(t, no) * 1000.0 for t in toks])
    nodes = []
    for k in range(n + 1):
        no, body = lines.next("node row")
        toks = _fields(no, body)
        if len(toks) < 5:
            raise ParseError("node row needs id, name, demand, ready, due, service", no)
        q, a, b, tau = (_num(t, no) for t in toks[-4:])
        if k == 0:
            q, tau = 0.0, 0.0
        nodes.append(Node(k, 0.0, 0.0, q, a, b, tau))
    params = PrpParameters(v_min=vmin, v_max=vmax, capacity_q=payload, fleet_size_m=max(n, 1))
    return Instance(name, tuple(nodes), params, matrix)


def format_instance(inst: Instance) -> str:
    p = inst.params
    out = [f"{MAGIC} {VERSION}", f"NAME {inst.name}",
           f"FLEET {p.fleet_size_m} {_fmt(p.capacity_q)}",
           "PARAMS " + " ".join(f"{k}={_fmt(getattr(p, attr))}" for k, attr in PARAM_KEYS.items()),
           f"NODES {len(inst.nodes)}",
           "# id x y demand tw_start tw_end service"]
    for nd in inst.nodes:
        out.append(" ".join([str(nd.id)] + [_fmt(v) for v in (nd.x, nd.y, nd.demand, nd.tw_start,
                                                                nd.tw_end, nd.service)]))
    if inst.matrix is not None:
        out.append("MATRIX")
        out.extend(" ".join(_fmt(v) for v in row) for row in inst.matrix)
    out.append("END")
    return "\n".join(out) + "\n"


def write_instance(inst: Instance, dest: Source) -> None:
    _write(dest, format_instance(inst))


def _write(dest: Source, text: str) -> None:
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


# --- solutions -------------------------------------------------------------

def format_solution(sol: Solution, inst: Instance) -> str:
    out = [f"{SOL_MAGIC} {VERSION}", f"INSTANCE {inst.name}", f"MODE {sol.mode}"]
    for k, (route, s) in enumerate(zip(sol.routes, sol.schedules or ())):
        out += [f"ROUTE {k + 1}",
                "VISITS " + " ".join(map(str, route.visits)),
                f"DEPARTURE {_fmt(s.departure)}",
                "ARRIVALS " + " ".join(map(_fmt, s.arrivals)),
                "SPEEDS " + " ".join(map(_fmt, s.speeds)),
                "WAITS " + " ".join(map(_fmt, s.waits)),
                f"FUEL {_fmt(route_fuel(route, s, inst))}",
                f"COST {_fmt(route_cost(route, s, inst, sol.mode))}"]
    out += [f"TOTAL {_fmt(sol.total_cost)}", f"OBJECTIVE {sol.mode}", "END"]
    return "\n".join(out) + "\n"


def write_solution(sol: Solution, inst: Instance, dest: Source) -> None:
    _write(dest, format_solution(sol, inst))


def parse_solution(src: Source) -> Solution:
    lines = _Lines(_read_text(src))
    _keyword(lines, SOL_MAGIC, 1)
    _keyword(lines, "INSTANCE", 1)
    no, toks = _keyword(lines, "MODE", 1)
    mode = toks[0][0]
    if mode not in (FIXED, FREE):
        raise ParseError(f"unknown mode {mode!r}", no, toks[0][1])
    routes, scheds = [], []
    while lines.peek() == "ROUTE":
        _keyword(lines, "ROUTE", 1)
        no, toks = _keyword(lines, "VISITS")
        try:
            route = Route(tuple(_num(t, no, int) for t in toks))
        except InputError as exc:
            raise ParseError(str(exc), no) from None
        _keyword(lines, "DEPARTURE", 1)
        no, toks = _keyword(lines, "ARRIVALS")
        arr = tuple(_num(t, no) for t in toks)
        no, toks = _keyword(lines, "SPEEDS")
        spd = tuple(_num(t, no) for t in toks)
        no, toks = _keyword(lines, "WAITS")
        wts = tuple(_num(t, no) for t in toks)
        _keyword(lines, "FUEL", 1)
        _keyword(lines, "COST", 1)
        try:
            scheds.append(Schedule(arr, spd, wts))
        except InputError as exc:
            raise ParseError(str(exc), no) from None
        routes.append(route)
    no, toks = _keyword(lines, "TOTAL", 1)
    total = _num(toks[0], no)
    _keyword(lines, "OBJECTIVE", 1)
    _keyword(lines, "END", 0)
    return Solution(tuple(routes), tuple(scheds), total, mode)


def parse_route(spec: str) -> Route:
    """``"0,3,1,0"`` or ``"0 3 1 0"`` -> Route."""
    try:
        visits = tuple(int(x) for x in spec.replace(",", " ").split())
    except ValueError:
        raise InputError(f"route must be a list of vertex ids: {spec!r}") from None
    return Route(visits)


# --- reports ---------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    instance: str
    mode: str
    avg_cost: float
    best_cost: float
    cpu_s: float
    gap_pct: Optional[float] = None


def gap_pct(z: float, z_bks: float) -> float:
    """Relative gap in percent against a best-known value."""
    return 100.0 * (z - z_bks) / z_bks


def format_report(rows: Iterable[ReportRow]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in rows:
        gap = "" if r.gap_pct is None else f"{r.gap_pct:.4f}"
        w.writerow([r.instance, r.mode, f"{r.avg_cost:.6f}", f"{r.best_cost:.6f}",
                    f"{r.cpu_s:.4f}", gap])
    return buf.getvalue()


def parse_report(src: Source) -> list:
    rows = []
    for rec in csv.DictReader(_io.StringIO(_read_text(src))):
        gap = rec["gap_pct"]
        rows.append(ReportRow(rec["instance"], rec["mode"], float(rec["avg_cost"]),
                              float(rec["best_cost"]), float(rec["cpu_s"]),
                              float(gap) if gap else None))
    return rows


def read_baseline(src: Source) -> dict:
    """``instance,cost`` lines (header optional) -> {instance: cost}."""
    out = {}
    for no, rec in enumerate(csv.reader(_io.StringIO(_read_text(src))), 1):
        if not rec or rec[0].startswith("#"):
            continue
        try:
            out[rec[0].strip()] = float(rec[1])
        except (ValueError, IndexError):
            if no == 1:
                continue  # header
            raise ParseError(f"bad baseline row {rec!r}", no) from None
    return out
