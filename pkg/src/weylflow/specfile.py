"""Realization spec files.

A spec file is TOML.  Top level: dimension, metric, and optionally kmax and
pmax.  Coefficient functions arrive as arrays of tables, sparse: anything
not listed is zero.

    dimension = 2
    metric = [1, 1]
    kmax = 4

    [[phi]]
    row = 0
    col = 0
    expr = "p_0^2"

    [[chi]]
    index = 1
    expr = "1/2 * p_0"
"""

from __future__ import annotations

import json
import sys
from typing import List

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pydantic import ValidationError

from .schemas import RealizationSpecModel, SpecError

_TOP_KEYS = {"dimension", "metric", "kmax", "pmax", "phi", "chi"}


def _require_int(table: dict, key: str, where: str) -> int:
    value = table.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise SpecError("spec", f"{where} needs an integer {key!r}", where=where)
    return value


def _require_expr(table: dict, where: str) -> str:
    value = table.get("expr")
    if not isinstance(value, str):
        raise SpecError("spec", f"{where} needs a string 'expr'", where=where)
    return value


def parse_spec_text(text: str) -> RealizationSpecModel:
    """Parse and validate one spec file's content."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError("toml", f"not valid TOML: {exc}") from exc
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise SpecError("spec", f"unknown keys: {', '.join(sorted(unknown))}")
    for key in ("dimension", "metric"):
        if key not in data:
            raise SpecError("spec", f"missing required key {key!r}")
    n = data["dimension"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SpecError("spec", "dimension must be a positive integer")

    phi: List[List[str]] = [["0"] * n for _ in range(n)]
    seen_phi = set()
    for i, table in enumerate(data.get("phi", [])):
        where = f"phi entry {i}"
        if not isinstance(table, dict):
            raise SpecError("spec", f"{where} must be a table", where=where)
        row = _require_int(table, "row", where)
        col = _require_int(table, "col", where)
        if not (0 <= row < n and 0 <= col < n):
            raise SpecError(
                "spec", f"{where}: row/col out of range for dimension {n}", where=where
            )
        if (row, col) in seen_phi:
            raise SpecError(
                "spec", f"{where}: duplicate entry for row {row}, col {col}", where=where
            )
        seen_phi.add((row, col))
        extra = set(table) - {"row", "col", "expr"}
        if extra:
            raise SpecError(
                "spec", f"{where}: unknown keys {', '.join(sorted(extra))}", where=where
            )
        phi[row][col] = _require_expr(table, where)

    chi: List[str] = ["0"] * n
    seen_chi = set()
    for i, table in enumerate(data.get("chi", [])):
        where = f"chi entry {i}"
        if not isinstance(table, dict):
            raise SpecError("spec", f"{where} must be a table", where=where)
        index = _require_int(table, "index", where)
        if not 0 <= index < n:
            raise SpecError(
                "spec", f"{where}: index out of range for dimension {n}", where=where
            )
        if index in seen_chi:
            raise SpecError(
                "spec", f"{where}: duplicate entry for index {index}", where=where
            )
        seen_chi.add(index)
        extra = set(table) - {"index", "expr"}
        if extra:
            raise SpecError(
                "spec", f"{where}: unknown keys {', '.join(sorted(extra))}", where=where
            )
        chi[index] = _require_expr(table, where)

    try:
        return RealizationSpecModel(
            dimension=n,
            metric=data["metric"],
            phi=phi,
            chi=chi,
            kmax=data.get("kmax"),
            pmax=data.get("pmax"),
        )
    except ValidationError as exc:
        first = exc.errors()[0]
        raise SpecError("spec", first["msg"]) from exc


def load_spec_file(path: str) -> RealizationSpecModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise SpecError("io", f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_spec_text(text)


def spec_to_toml(spec: RealizationSpecModel) -> str:
    """Render a spec back to TOML, sparse form, skipping zero entries."""
    lines = [f"dimension = {spec.dimension}"]
    lines.append(f"metric = [{', '.join(str(e) for e in spec.metric)}]")
    if spec.kmax is not None:
        lines.append(f"kmax = {spec.kmax}")
    if spec.pmax is not None:
        lines.append(f"pmax = {spec.pmax}")
    for row in range(spec.dimension):
        for col in range(spec.dimension):
            expr = spec.phi[row][col]
            if expr.strip() == "0":
                continue
            lines += ["", "[[phi]]", f"row = {row}", f"col = {col}",
                      f"expr = {json.dumps(expr)}"]
    for index in range(spec.dimension):
        expr = spec.chi[index]
        if expr.strip() == "0":
            continue
        lines += ["", "[[chi]]", f"index = {index}", f"expr = {json.dumps(expr)}"]
    return "\n".join(lines) + "\n"
