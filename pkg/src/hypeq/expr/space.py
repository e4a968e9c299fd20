"""Variable declarations: jet coordinates, auxiliary coordinates, free functions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class VarInfo:
    name: str
    kind: str  # independent | dependent | jet | auxiliary
    base: Optional[str] = None  # dependent variable a jet coordinate differentiates
    index: tuple = ()  # multi-index (order in x, order in y)
    tilde: bool = False


def _jet_family(prefix: str, tilde: bool):
    x, y, u = (prefix + "x", prefix + "y", prefix + "u")
    infos = [
        VarInfo(x, "independent", tilde=tilde),
        VarInfo(y, "independent", tilde=tilde),
        VarInfo(u, "dependent", tilde=tilde),
    ]
    for nx, ny in ((1, 0), (0, 1), (2, 0), (1, 1), (0, 2)):
        infos.append(VarInfo(u + "x" * nx + "y" * ny, "jet", u, (nx, ny), tilde))
    return infos


@dataclass
class VariableSpace:
    """Ordered, uniquely named variables plus declared free-function symbols."""

    variables: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)

    @classmethod
    def default(cls) -> "VariableSpace":
        space = cls()
        for info in _jet_family("", False) + _jet_family("t", True):
            space.add(info)
        for name in ("tau", "xi", "ups", "eta"):
            space.add(VarInfo(name, "auxiliary"))
        space.declare_function("theta", ("x", "y", "u"))
        return space

    def add(self, info: VarInfo) -> None:
        if info.name in self.variables or info.name in self.functions:
            raise ValueError(f"name {info.name!r} already declared")
        if info.base is not None and info.base not in self.variables:
            raise ValueError(f"jet variable {info.name!r} refers to undeclared {info.base!r}")
        self.variables[info.name] = info

    def declare_variable(self, name: str, kind: str = "auxiliary") -> "VariableSpace":
        if name not in self.variables:
            self.add(VarInfo(name, kind))
        return self

    def declare_function(self, name: str, params) -> "VariableSpace":
        if name in self.variables:
            raise ValueError(f"name {name!r} already declared as a variable")
        self.functions[name] = tuple(params)
        return self

    def copy(self) -> "VariableSpace":
        return VariableSpace(dict(self.variables), dict(self.functions))

    def __contains__(self, name) -> bool:
        return name in self.variables

    @property
    def names(self) -> tuple:
        return tuple(self.variables)

    def jet_order(self, name: str) -> int:
        info = self.variables.get(name)
        if info is None or info.kind != "jet":
            return 0
        return sum(info.index)


DEFAULT_SPACE = VariableSpace.default()

FIRST_JET = ("x", "y", "u", "ux", "uy")
SECOND_JET = ("uxx", "uxy", "uyy")
TILDE_FIRST_JET = ("tx", "ty", "tu", "tux", "tuy")
AUXILIARY = ("tau", "xi", "ups", "eta")
