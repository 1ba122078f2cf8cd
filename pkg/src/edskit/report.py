"""Analysis reports: construction, JSON round-trip and a plain-text emitter.

Every number in a report is an exact integer or a ``"p/q"`` string.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .linalg import format_rat

__all__ = ["Report", "from_analysis", "from_point", "from_hstruct", "SCHEMA_KEYS", "DIM_KEYS"]

SCHEMA_KEYS = ("entry", "mode", "identities", "characters", "dims", "verdict", "generality",
               "invariant_counts", "seed", "ms")
DIM_KEYS = ("tableau", "prolongation", "K0", "K1", "h1", "codim", "bound")


def _exact(x):
    if isinstance(x, bool):
        raise TypeError("booleans are not report numbers")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return format_rat(x)
    if isinstance(x, str):
        return x
    raise TypeError(f"not an exact number: {x!r}")


def _flag_json(vectors):
    return [[_exact(Fraction(x)) for x in v] for v in vectors]


@dataclass
class Report:
    entry: str
    mode: str
    identities: list = field(default_factory=list)  # [{"name", "status"}]
    characters: dict = field(default_factory=lambda: {"s": [], "flag": []})
    dims: dict = field(default_factory=dict)
    verdict: str = ""
    generality: str = ""
    invariant_counts: list = field(default_factory=list)  # [{"k", "count"}]
    seed: int = 0
    ms: int = 0

    def __post_init__(self):
        bad = set(self.dims) - set(DIM_KEYS)
        if bad:
            raise ValueError(f"unknown dims keys: {sorted(bad)}")

    # -- JSON -------------------------------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = {k: d["dims"][k] for k in DIM_KEYS if k in d["dims"]}
        return {k: d[k] for k in SCHEMA_KEYS}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        missing = [k for k in SCHEMA_KEYS if k not in d]
        if missing:
            raise ValueError(f"report is missing keys: {missing}")
        return cls(**{k: d[k] for k in SCHEMA_KEYS})

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def without_timing(self) -> "Report":
        return Report(**{**self.to_dict(), "ms": 0})

    # -- text -------------------------------------------------------------------------
    def to_text(self) -> str:
        s = self.characters.get("s", [])
        lines = [
            f"entry:       {self.entry}",
            f"mode:        {self.mode}",
            f"verdict:     {self.verdict}",
            "characters:  s = (" + ", ".join(str(x) for x in s) + ")",
        ]
        flag = self.characters.get("flag")
        if flag:
            if isinstance(flag, str):
                lines.append(f"flag:        {flag}")
            else:
                lines.append("flag:        " + " ".join("[" + ",".join(str(x) for x in v) + "]" for v in flag))
        if self.dims:
            lines.append("dims:        " + " ".join(f"{k}={v}" for k, v in self.to_dict()["dims"].items()))
        if self.generality:
            lines.append(f"generality:  {self.generality}")
        if self.invariant_counts:
            lines.append("invariants:  " + " ".join(f"k={c['k']}:{c['count']}" for c in self.invariant_counts))
        for ident in self.identities:
            lines.append(f"identity:    {ident['name']} -> {ident['status']}")
        lines.append(f"seed:        {self.seed}")
        lines.append(f"time:        {self.ms} ms")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------------
# builders


def from_analysis(entry: str, rep, seed: int, ms: int = 0) -> Report:
    """From a :class:`edskit.structeq.AnalysisReport`."""
    idents = []
    if rep.identities is not None:
        idents = [{"name": i.name, "status": i.status} for i in rep.identities.identities]
    if rep.jacobi is not None:
        idents.append({"name": "Jacobi manifold", "status": "holds" if rep.jacobi.solvable else "fails"})
    chars = rep.characters
    s0 = chars.s0 if chars.s0 is not None else 0
    flag = _flag_json(rep.involutivity.flag_used.basis) if rep.involutivity is not None else []
    return Report(
        entry=entry,
        mode=rep.mode,
        identities=idents,
        characters={"s": [s0] + list(chars.s), "flag": flag},
        dims={k: v for k, v in rep.dims.items() if k in DIM_KEYS},
        verdict=rep.verdict,
        generality=rep.generality,
        invariant_counts=[{"k": k, "count": c} for k, c in rep.invariant_counts],
        seed=seed,
        ms=ms,
    )


def from_point(entry: str, flag_report, flag_vectors, seed: int, ms: int = 0) -> Report:
    """From a :class:`edskit.point.FlagReport` of an ordinary_test run."""
    s = list(flag_report.s)
    last = None
    for q, x in enumerate(s[1:], start=1):
        if x:
            last = (q, x)
    if last is None:
        generality = "integral manifolds depend on finitely many constants"
    else:
        q, x = last
        generality = (f"integral manifolds depend on {x} function{'s' if x != 1 else ''} "
                      f"of {q} variable{'s' if q != 1 else ''}")
    return Report(
        entry=entry,
        mode="POINT",
        identities=[],
        characters={"s": s, "flag": _flag_json(flag_vectors)},
        dims={"codim": _exact(flag_report.codim), "bound": flag_report.bound},
        verdict=flag_report.ordinary,
        generality=generality,
        invariant_counts=[],
        seed=seed,
        ms=ms,
    )


def from_hstruct(entry: str, tf, agree: bool | None, seed: int, ms: int = 0) -> Report:
    """From a :class:`edskit.hstruct.TorsionFreeReport` (plus the cross-check outcome)."""
    idents = [{"name": "closed under bracket", "status": "holds"}]
    if agree is not None:
        idents.append({"name": "emitted structure equations agree", "status": "holds" if agree else "fails"})
    k = tf.kernels
    inv = tf.involutivity
    return Report(
        entry=entry,
        mode="HSTRUCT",
        identities=idents,
        characters={"s": [0] + list(inv.characters.s), "flag": _flag_json(inv.flag_used.basis)},
        dims={"tableau": k.K0.dim, "prolongation": k.K1.dim, "K0": k.K0.dim, "K1": k.K1.dim,
              "h1": k.h1_dim, "bound": inv.bound},
        verdict=tf.verdict,
        generality=tf.generality,
        invariant_counts=[],
        seed=seed,
        ms=ms,
    )
