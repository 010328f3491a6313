"""Scenario and report persistence: canonical JSON, integers only.

Round-trip stability is part of the contract: save -> load -> save is byte
identical (sorted keys, fixed indentation, no floats anywhere), and reports
are deterministic functions of (scenario, flags, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

from .errors import InputError
from .exterior import MultiVector, Subspace
from .field import Field
from .lagrangian import AMBIENT, Lagrangian
from .zlines import ZLine, zline_validate

SCENARIO_SCHEMA = "epw-scenario/1"
REPORT_SCHEMA = "epw-report/1"
ZLINE_SCHEMA = "epw-zline/1"
POLY_SCHEMA = "epw-poly/1"


class SchemaError(InputError):
    """Unrecognized or malformed on-disk data (exit code 3)."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def field_to_json(field: Field) -> dict:
    out = {"p": field.p, "k": field.k}
    if field.modulus is not None:
        out["modulus"] = list(field.modulus)
    return out


def field_from_json(obj: dict) -> Field:
    try:
        p, k = int(obj["p"]), int(obj["k"])
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad field descriptor: {e}") from None
    modulus = obj.get("modulus")
    return Field(p, k, tuple(modulus) if modulus else None)


@dataclass
class Scenario:
    field: Field
    lagrangian: Lagrangian
    zlines: dict = dc_field(default_factory=dict)
    seed: int = 0
    notes: str = ""

    def to_json_obj(self) -> dict:
        prov = {
            k: v
            for k, v in self.lagrangian.provenance.items()
            if k in ("constraint", "seed")
        }
        obj = {
            "schema": SCENARIO_SCHEMA,
            "field": field_to_json(self.field),
            "seed": self.seed,
            "lagrangian": [[c.lift() for c in row] for row in self.lagrangian.space.rows],
            "zlines": {name: z.to_json_obj() for name, z in sorted(self.zlines.items())},
            "provenance": prov,
            "notes": self.notes,
        }
        wits = self.lagrangian.provenance.get("witnesses")
        if wits:
            obj["witnesses"] = [list(w) for w in wits]
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Scenario":
        if obj.get("schema") != SCENARIO_SCHEMA:
            raise SchemaError(f"unrecognized scenario schema {obj.get('schema')!r}")
        field = field_from_json(obj.get("field", {}))
        rows = obj.get("lagrangian")
        if not isinstance(rows, list) or len(rows) != 10:
            raise SchemaError("scenario must carry a 10-row basis")
        sub = Subspace(field, AMBIENT, rows)
        prov = dict(obj.get("provenance", {}))
        if "witnesses" in obj:
            prov["witnesses"] = [tuple(w) for w in obj["witnesses"]]
        try:
            lag = Lagrangian(sub, prov)
        except InputError:
            raise SchemaError("stored basis is not Lagrangian") from None
        zlines = {}
        for name, zobj in obj.get("zlines", {}).items():
            zlines[name] = zline_from_json(field, zobj)
        return cls(field, lag, zlines, int(obj.get("seed", 0)), obj.get("notes", ""))


def zline_to_json(z: ZLine) -> dict:
    out = z.to_json_obj()
    out["schema"] = ZLINE_SCHEMA
    return out


def zline_from_json(field: Field, obj: dict) -> ZLine:
    if "v1" not in obj or "v2" not in obj or "alpha" not in obj:
        raise SchemaError("z-line JSON needs v1, v2, alpha")
    return zline_validate(field, obj["v1"], obj["v2"], MultiVector(field, 2, obj["alpha"]))


def save_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read {path}: {e}") from None


class Report:
    """Machine-readable result tree; exit status 0 only when all checks pass."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.checks: list[dict] = []

    def add(self, name: str, passed: bool, **witness) -> None:
        entry = {"name": name, "status": "pass" if passed else "fail"}
        entry.update(witness)
        self.checks.append(entry)

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json_obj(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "params": self.params,
            "checks": sorted(self.checks, key=lambda c: c["name"]),
            "status": "pass" if self.passed else "fail",
        }

    def summary_lines(self) -> list[str]:
        out = []
        for c in sorted(self.checks, key=lambda c: c["name"]):
            mark = "PASS" if c["status"] == "pass" else "FAIL"
            extra = {k: v for k, v in c.items() if k not in ("name", "status")}
            tail = f"  {json.dumps(extra, sort_keys=True)}" if extra else ""
            out.append(f"[{mark}] {c['name']}{tail}")
        out.append(f"overall: {'pass' if self.passed else 'fail'}")
        return out
