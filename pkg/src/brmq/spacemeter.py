"""Bit-exact space reports built from the same part tree that serialization writes."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .codec import Encoded, Field, Raw


@dataclass
class Component:
    name: str
    kind: str
    bits: int
    children: list[Component] = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "bits": self.bits}
        if self.detail:
            out["detail"] = self.detail
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out


@dataclass
class SpaceReport:
    structure: str
    tag: int
    context: dict
    root: Component

    @property
    def total_bits(self) -> int:
        return self.root.bits

    @property
    def elements(self) -> int:
        ctx = self.context
        if "m" in ctx and "n" in ctx:
            return ctx["m"] * ctx["n"]
        for key in ("n", "count", "length"):
            if key in ctx:
                return ctx[key]
        return 0

    @property
    def bits_per_element(self) -> float:
        return self.total_bits / self.elements if self.elements else 0.0

    def component(self, path: str) -> Component:
        """Look up a component by slash-separated names, e.g. ``"core/directory"``."""
        node = self.root
        for name in path.split("/"):
            for child in node.children:
                if child.name == name:
                    node = child
                    break
            else:
                raise KeyError(f"no component {path!r} in {self.structure} report")
        return node

    def bits(self, path: str) -> int:
        return self.component(path).bits

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "tag": self.tag,
            "context": self.context,
            "total_bits": self.total_bits,
            "elements": self.elements,
            "bits_per_element": self.bits_per_element,
            "components": self.root.to_dict()["children"] if self.root.children else [],
        }


def _node(name: str, part) -> Component:
    if isinstance(part, Field):
        return Component(name, "field", part.bits, detail={"count": len(part.values), "width": part.width})
    if isinstance(part, Raw):
        return Component(name, "bits", part.bits)
    if isinstance(part, Encoded):
        kids = [_node(k, p) for k, p in part._parts().items()]
        return Component(name, part.NAME, sum(c.bits for c in kids), kids, part.context())
    kids = [_node(k, p) for k, p in part.items()]
    return Component(name, "group", sum(c.bits for c in kids), kids)


def measure(structure: Encoded) -> SpaceReport:
    root = _node(structure.NAME, structure)
    return SpaceReport(structure.NAME, structure.TAG, structure.context(), root)


def emit_report(report: SpaceReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"
