"""Structure definition files (TOML).

A ``.struct`` file declares a chart, a kind and its tensor components as
expression strings keyed by 1-based index strings (``"12"`` is
``d_1 ^ d_2``; use commas, ``"1,12"``, once the chart has ten or more
coordinates)::

    kind = "jacobi_pair"            # or "contact_form"
    chart = ["x", "y", "z"]

    [meta]
    name = "poisson_r3"
    description = "constant Poisson bivector"
    expect = "pass"                 # used by the self-test

    [lambda]                        # jacobi_pair only
    "12" = "1"

    [r]                             # jacobi_pair only (may be empty)

    [theta]                         # contact_form only
    "3" = "1"
    "1" = "-y"
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .contact import ContactForm
from .extcalc import DiffForm, MultiVector, parse_index_key
from .jacobi import JacobiPair
from .symcore import Chart, ParseError, parse

__all__ = ["StructureFile", "StructureFileError", "load", "loads", "bundled_names", "resolve"]

KINDS = {"jacobi_pair": ("lambda", "r"), "contact_form": ("theta",)}
_TENSOR_GRADES = {"lambda": 2, "r": 1, "theta": 1}


class StructureFileError(ValueError):
    pass


@dataclass(frozen=True)
class StructureFile:
    chart: Chart
    kind: str
    tensors: dict = field(hash=False)
    meta: dict = field(default_factory=dict, hash=False)
    path: str = ""

    @property
    def name(self) -> str:
        return self.meta.get("name") or Path(self.path).stem or "<inline>"

    def jacobi_pair(self) -> JacobiPair:
        if self.kind != "jacobi_pair":
            raise StructureFileError(f"{self.name} is a {self.kind}, not a jacobi_pair")
        return JacobiPair(self.tensors["lambda"], self.tensors["r"])

    def contact_form(self) -> ContactForm:
        if self.kind != "contact_form":
            raise StructureFileError(f"{self.name} is a {self.kind}, not a contact_form")
        return ContactForm(self.tensors["theta"])


def _tensor(chart: Chart, key: str, table) -> Union[MultiVector, DiffForm]:
    if not isinstance(table, dict):
        raise StructureFileError(f"[{key}] must be a table of index = expression")
    grade = _TENSOR_GRADES[key]
    comps = {}
    for idx, src in table.items():
        try:
            index = parse_index_key(str(idx), chart.dim)
        except ValueError as exc:
            raise StructureFileError(f"[{key}] {exc}") from None
        if len(index) != grade:
            raise StructureFileError(f"[{key}] index {idx!r} should have {grade} entries")
        if len(set(index)) != len(index):
            raise StructureFileError(f"[{key}] index {idx!r} repeats a coordinate")
        if not isinstance(src, (str, int)):
            raise StructureFileError(f"[{key}] {idx!r}: expected an expression string")
        try:
            value = parse(str(src), chart)
        except ParseError as exc:
            raise StructureFileError(f"[{key}] {idx!r}: {exc}") from None
        if tuple(sorted(index)) in {tuple(sorted(k)) for k in comps}:
            raise StructureFileError(f"[{key}] index {idx!r} given twice")
        comps[index] = value
    cls = DiffForm if key == "theta" else MultiVector
    return cls(chart, grade, comps)


def loads(text: str, path: str = "") -> StructureFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise StructureFileError(f"{path or '<input>'}: {exc}") from None
    kind = data.get("kind")
    if kind not in KINDS:
        raise StructureFileError(f"kind must be one of {sorted(KINDS)}, got {kind!r}")
    names = data.get("chart")
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise StructureFileError("chart must be a list of coordinate names")
    try:
        chart = Chart(names)
    except ValueError as exc:
        raise StructureFileError(str(exc)) from None
    wanted = KINDS[kind]
    others = {k for ks in KINDS.values() for k in ks} - set(wanted)
    extra = sorted(k for k in data if k in others)
    if extra:
        raise StructureFileError(f"{kind} files must not define {extra}")
    unknown = sorted(set(data) - {"kind", "chart", "meta"} - set(wanted) - others)
    if unknown:
        raise StructureFileError(f"unknown top-level keys {unknown}")
    tensors = {}
    for key in wanted:
        if key not in data:
            if key == "r":
                data[key] = {}
            else:
                raise StructureFileError(f"{kind} files need a [{key}] table")
        tensors[key] = _tensor(chart, key, data[key])
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise StructureFileError("[meta] must be a table")
    if kind == "contact_form" and chart.dim % 2 == 0:
        raise StructureFileError("contact_form files need an odd-dimensional chart")
    return StructureFile(chart, kind, tensors, dict(meta), path)


def load(path: Union[str, Path]) -> StructureFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise StructureFileError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(p))


def _data_dir():
    return resources.files("jacobi_kit") / "data"


def bundled_names() -> list[str]:
    return sorted(f.name[: -len(".struct")] for f in _data_dir().iterdir() if f.name.endswith(".struct"))


def resolve(target: str) -> StructureFile:
    """Load a path, or a bundled example by name (``poisson_r3``)."""
    p = Path(target)
    if p.exists():
        return load(p)
    name = target[:-7] if target.endswith(".struct") else target
    if name in bundled_names():
        f = _data_dir() / f"{name}.struct"
        return loads(f.read_text(), f"{name}.struct")
    raise StructureFileError(f"no such file or bundled example: {target}")
