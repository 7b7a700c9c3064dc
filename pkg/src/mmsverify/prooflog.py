"""Replayable record of every deduction, solve, and branch decision.

The text form is line oriented and stable: replaying a run with the same
header parameters must reproduce the event lines byte for byte (wall time
is deliberately kept out of the text form).  A structured JSON mirror of
the same events is available for tooling.
"""

from __future__ import annotations

import json
from typing import Optional

from .kset import KSet, format_kset

FORMAT_NAME = "PROOF mmsverify 1"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return str(int(v))
    return str(v)


class ProofLog:
    def __init__(self, header: dict):
        self.header = dict(header)
        self.events: list[dict] = []
        self.footer: Optional[dict] = None
        self._gdeps: set[tuple[int, int]] = set()

    # -- event emitters -------------------------------------------------

    def gdep(self, n: int, k: int, g: Optional[int]) -> None:
        if (n, k) in self._gdeps:
            return
        self._gdeps.add((n, k))
        self.events.append({"type": "gdep", "n": n, "k": k, "g": g})

    def neg(self, round_no: int, s: KSet, rule: str,
            cert: Optional[str] = None) -> None:
        self.events.append({"type": "neg", "round": round_no,
                            "set": list(s), "rule": rule, "cert": cert})

    def pos(self, round_no: int, s: KSet, rule: str, cert: str) -> None:
        self.events.append({"type": "pos", "round": round_no,
                            "set": list(s), "rule": rule, "cert": cert})

    def lp(self, verdict: str, obj=None, cert: Optional[str] = None) -> None:
        self.events.append({"type": "lp", "verdict": verdict,
                            "obj": None if obj is None else str(obj),
                            "cert": cert})

    def threshold(self, count: int, target: int) -> None:
        self.events.append({"type": "threshold", "count": count,
                            "target": target})

    def node_open(self, path: str, depth: int) -> None:
        self.events.append({"type": "node_open", "path": path, "depth": depth})

    def node_close(self, outcome: str) -> None:
        self.events.append({"type": "node_close", "outcome": outcome})

    def branch(self, s: KSet, direction: str, path: str) -> None:
        self.events.append({"type": "branch", "set": list(s),
                            "dir": direction, "path": path})

    def witness(self, s_count: int, x) -> None:
        self.events.append({"type": "witness", "s": s_count,
                            "x": [str(v) for v in x]})

    def result(self, verdict: str, nodes: int, wall_time: float) -> None:
        self.footer = {"verdict": verdict, "nodes": nodes,
                       "wall_time": wall_time}

    def extend(self, events: list[dict]) -> None:
        self.events.extend(events)

    # -- rendering --------------------------------------------------------

    def header_lines(self) -> list[str]:
        h = self.header
        query = (f"QUERY n={h['n']} k={h['k']} t={h['t']} "
                 f"mode={h['mode']} strong={_fmt(h.get('strong', False))}")
        cfg = " ".join(f"{key}={_fmt(val)}" for key, val in h["config"].items())
        return [FORMAT_NAME, query, f"CONFIG {cfg}"]

    def event_lines(self) -> list[str]:
        return [_render(e) for e in self.events]

    def result_line(self) -> str:
        f = self.footer or {"verdict": "INDETERMINATE", "nodes": 0}
        return f"RESULT {f['verdict']} NODES={f['nodes']}"

    def to_text(self) -> str:
        lines = self.header_lines() + self.event_lines() + [self.result_line()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"header": self.header, "events": self.events,
                           "footer": self.footer}, sort_keys=True, indent=1)

    # -- helpers for tests and replay --------------------------------------

    def rounds(self, kind: str) -> dict[int, list[KSet]]:
        """Per-round families of 'neg' or 'pos' additions, as tuples."""
        out: dict[int, list[KSet]] = {}
        for e in self.events:
            if e["type"] == kind:
                out.setdefault(e["round"], []).append(tuple(e["set"]))
        return out


def _render(e: dict) -> str:
    t = e["type"]
    if t == "gdep":
        g = "ABSENT" if e["g"] is None else e["g"]
        return f"GDEP n={e['n']} k={e['k']} g={g}"
    if t == "neg" or t == "pos":
        line = (f"ROUND {e['round']} {t.upper()} "
                f"{format_kset(tuple(e['set']))} RULE={e['rule']}")
        if e.get("cert"):
            line += f" CERT={e['cert']}"
        return line
    if t == "lp":
        line = f"LP VERDICT={e['verdict']}"
        if e["obj"] is not None:
            line += f" OBJ={e['obj']}"
        if e.get("cert"):
            line += f" CERT={e['cert']}"
        return line
    if t == "threshold":
        return f"THRESHOLD COUNT={e['count']} TARGET={e['target']}"
    if t == "node_open":
        return f"NODE OPEN PATH={e['path'] or '-'} DEPTH={e['depth']}"
    if t == "node_close":
        return f"NODE CLOSE OUTCOME={e['outcome']}"
    if t == "branch":
        return (f"BRANCH {format_kset(tuple(e['set']))} DIR={e['dir']} "
                f"PATH={e['path']}")
    if t == "witness":
        return f"WITNESS S={e['s']} X={','.join(e['x'])}"
    raise ValueError(f"unknown event type {t!r}")


def parse_text(text: str) -> dict:
    """Parse a text proof log into header fields, event lines, and result.

    Event lines are kept verbatim; replay compares rendered lines rather
    than re-interpreting them.
    """
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_NAME:
        raise ValueError("not a recognizable proof log")
    query = _parse_kv(lines[1], "QUERY")
    config = _parse_kv(lines[2], "CONFIG")
    events = lines[3:-1]
    result = lines[-1]
    if not result.startswith("RESULT "):
        raise ValueError("missing RESULT line")
    parts = result.split()
    gdeps = []
    for ln in events:
        if ln.startswith("GDEP "):
            kv = _parse_kv(ln, "GDEP")
            g = None if kv["g"] == "ABSENT" else int(kv["g"])
            gdeps.append((int(kv["n"]), int(kv["k"]), g))
    return {
        "n": int(query["n"]), "k": int(query["k"]), "t": int(query["t"]),
        "mode": query["mode"], "strong": query["strong"] == "1",
        "config": config,
        "events": events,
        "verdict": parts[1],
        "nodes": int(parts[2].split("=")[1]),
        "gdeps": gdeps,
    }


def _parse_kv(line: str, prefix: str) -> dict:
    if not line.startswith(prefix + " "):
        raise ValueError(f"expected {prefix} line, got {line!r}")
    out = {}
    for tok in line[len(prefix) + 1:].split():
        key, _, val = tok.partition("=")
        out[key] = val
    return out
