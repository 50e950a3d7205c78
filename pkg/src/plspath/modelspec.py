"""Declarative latent-variable model: reflective blocks, structural paths,
higher-order constructs, interaction (moderation) terms and hypotheses.

Model files are JSON::

    {"constructs":   [{"name": "DI", "indicators": ["Q1-1", ...]}, ...],
     "paths":        [{"from": "SOSDIT", "to": "SDGI"}, ...],
     "higher_order": [{"name": "SOSDIT", "components": ["DI", "DPS", "DS"]}],
     "interactions": [{"moderator": "GINI", "predictor": "SOSDIT", "target": "SDGI"}],
     "hypotheses":   [{"id": "H5", "from": "GINI", "to": "SDGI", "sign": "-"}, ...]}

Only ``constructs`` is required. An interaction is addressed by the name
``"<moderator> x <predictor>"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class ModelError(ValueError):
    pass


SIGNS = ("+", "-", "any")


@dataclass(frozen=True)
class Construct:
    name: str
    indicators: tuple[str, ...]
    mode: str = "reflective"


@dataclass(frozen=True)
class StructuralPath:
    source: str
    target: str


@dataclass(frozen=True)
class HigherOrder:
    name: str
    components: tuple[str, ...]


@dataclass(frozen=True)
class Interaction:
    moderator: str
    predictor: str
    target: str

    @property
    def name(self) -> str:
        return interaction_name(self.moderator, self.predictor)


@dataclass(frozen=True)
class Hypothesis:
    id: str
    source: str
    target: str
    sign: str = "+"


def interaction_name(moderator, predictor):
    return f"{moderator} x {predictor}"


@dataclass(frozen=True)
class ModelSpec:
    constructs: tuple[Construct, ...]
    paths: tuple[StructuralPath, ...] = ()
    higher_order: tuple[HigherOrder, ...] = ()
    interactions: tuple[Interaction, ...] = ()
    hypotheses: tuple[Hypothesis, ...] = field(default=())

    # -- lookups -----------------------------------------------------------
    @property
    def construct_names(self) -> list[str]:
        return [c.name for c in self.constructs]

    @property
    def declared(self) -> list[str]:
        """First-order, higher-order and interaction names, in that order."""
        return (self.construct_names + [h.name for h in self.higher_order]
                + [i.name for i in self.interactions])

    def construct(self, name) -> Construct:
        for c in self.constructs:
            if c.name == name:
                return c
        raise KeyError(name)

    def blocks(self) -> dict[str, tuple[str, ...]]:
        return {c.name: c.indicators for c in self.constructs}

    def predecessors(self, name) -> list[str]:
        return [p.source for p in self.paths if p.target == name]

    def successors(self, name) -> list[str]:
        return [p.target for p in self.paths if p.source == name]

    def endogenous(self) -> list[str]:
        seen = []
        for p in self.paths:
            if p.target not in seen:
                seen.append(p.target)
        return seen

    @property
    def is_first_order(self) -> bool:
        return not self.higher_order and not self.interactions

    def edges(self) -> list[tuple[str, str]]:
        """Every directed dependency: paths, component->higher-order and
        moderator/predictor->target of each interaction."""
        out = [(p.source, p.target) for p in self.paths]
        for h in self.higher_order:
            out += [(c, h.name) for c in h.components]
        for i in self.interactions:
            out += [(i.moderator, i.target), (i.predictor, i.target), (i.name, i.target)]
        return out

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        d: dict = {"constructs": [{"name": c.name, "indicators": list(c.indicators)} for c in self.constructs]}
        d["paths"] = [{"from": p.source, "to": p.target} for p in self.paths]
        d["higher_order"] = [{"name": h.name, "components": list(h.components)} for h in self.higher_order]
        d["interactions"] = [
            {"moderator": i.moderator, "predictor": i.predictor, "target": i.target}
            for i in self.interactions
        ]
        d["hypotheses"] = [
            {"id": h.id, "from": h.source, "to": h.target, "sign": h.sign} for h in self.hypotheses
        ]
        return d

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


_TOP = {"constructs", "paths", "higher_order", "interactions", "hypotheses"}
_FIELDS = {
    "constructs": ({"name", "indicators"}, {"mode"}),
    "paths": ({"from", "to"}, set()),
    "higher_order": ({"name", "components"}, set()),
    "interactions": ({"moderator", "predictor", "target"}, set()),
    "hypotheses": ({"id", "from", "to"}, {"sign"}),
}


def _check_fields(section, item):
    if not isinstance(item, dict):
        raise ModelError(f"{section}: entries must be objects")
    required, optional = _FIELDS[section]
    unknown = set(item) - required - optional
    if unknown:
        raise ModelError(f"{section}: unknown field(s) {sorted(unknown)}")
    absent = required - set(item)
    if absent:
        raise ModelError(f"{section}: missing field(s) {sorted(absent)}")


def from_dict(d: dict) -> ModelSpec:
    if not isinstance(d, dict):
        raise ModelError("model must be a JSON object")
    unknown = set(d) - _TOP
    if unknown:
        raise ModelError(f"unknown field(s) {sorted(unknown)}")
    if "constructs" not in d:
        raise ModelError("model needs a 'constructs' list")
    for section in _TOP:
        for item in d.get(section, []):
            _check_fields(section, item)

    constructs = []
    for c in d["constructs"]:
        mode = c.get("mode", "reflective")
        if mode != "reflective":
            raise ModelError(f"construct {c['name']}: only reflective (Mode A) blocks are supported")
        if not c["indicators"]:
            raise ModelError(f"construct {c['name']}: empty indicator block")
        constructs.append(Construct(c["name"], tuple(c["indicators"])))
    higher = []
    for h in d.get("higher_order", []):
        if not h["components"]:
            raise ModelError(f"higher-order construct {h['name']}: no components")
        higher.append(HigherOrder(h["name"], tuple(h["components"])))
    spec = ModelSpec(
        constructs=tuple(constructs),
        paths=tuple(StructuralPath(p["from"], p["to"]) for p in d.get("paths", [])),
        higher_order=tuple(higher),
        interactions=tuple(Interaction(i["moderator"], i["predictor"], i["target"])
                           for i in d.get("interactions", [])),
        hypotheses=tuple(Hypothesis(h["id"], h["from"], h["to"], h.get("sign", "+"))
                         for h in d.get("hypotheses", [])),
    )
    problems = _reference_problems(spec)
    if problems:
        raise ModelError("; ".join(problems))
    return spec


def parse_model(text: str) -> ModelSpec:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"syntax error: {exc}") from exc
    return from_dict(d)


def load_model(path=None) -> ModelSpec:
    """Read a model file; with no path, the shipped default is used."""
    if path is None:
        text = resources.files("plspath").joinpath("data/model.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_model(text)


def default_model() -> ModelSpec:
    return load_model(None)


def _reference_problems(spec: ModelSpec) -> list[str]:
    out = []
    names = spec.declared
    for n in set(names):
        if names.count(n) > 1:
            out.append(f"duplicate construct name: {n}")
    base = set(spec.construct_names) | {h.name for h in spec.higher_order}
    for p in spec.paths:
        for end in (p.source, p.target):
            if end not in names:
                out.append(f"undeclared construct: {end} (path {p.source} -> {p.target})")
    for h in spec.higher_order:
        for c in h.components:
            if c not in spec.construct_names:
                out.append(f"undeclared construct: {c} (component of {h.name})")
    for i in spec.interactions:
        for who in (i.moderator, i.predictor, i.target):
            if who not in base:
                out.append(f"undeclared construct: {who} (interaction {i.name})")
    for h in spec.hypotheses:
        if h.sign not in SIGNS:
            out.append(f"hypothesis {h.id}: sign must be one of {SIGNS}")
        for end in (h.source, h.target):
            if end not in names:
                out.append(f"undeclared construct: {end} (hypothesis {h.id})")
    return out


def _find_cycle(nodes, edges):
    """First cycle met by a depth-first search over sorted nodes and sorted
    successors, so the answer depends only on the graph."""
    adj = {n: set() for n in nodes}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set())
    adj = {n: sorted(m) for n, m in adj.items()}
    state = {n: 0 for n in adj}
    stack: list[str] = []

    def visit(n):
        state[n] = 1
        stack.append(n)
        for m in adj[n]:
            if state[m] == 1:
                return stack[stack.index(m):] + [m]
            if state[m] == 0:
                found = visit(m)
                if found:
                    return found
        stack.pop()
        state[n] = 2
        return None

    for n in sorted(adj):
        if state[n] == 0:
            found = visit(n)
            if found:
                return found
    return None


def ancestors(spec: ModelSpec, name) -> set[str]:
    parents: dict[str, set[str]] = {}
    for a, b in spec.edges():
        parents.setdefault(b, set()).add(a)
    out: set[str] = set()
    todo = list(parents.get(name, ()))
    while todo:
        n = todo.pop()
        if n not in out:
            out.add(n)
            todo.extend(parents.get(n, ()))
    return out


def validate_model(spec: ModelSpec, data=None) -> list[str]:
    """Return the sorted list of violations (empty when the model is usable).

    ``data`` is anything with a ``columns`` attribute (a Dataset or a
    StandardizedMatrix); indicator presence is checked only when given.
    """
    out = set(_reference_problems(spec))
    cycle = _find_cycle(spec.declared, spec.edges())
    if cycle:
        out.add("cycle: " + " -> ".join(cycle))
    owners: dict[str, list[str]] = {}
    for c in spec.constructs:
        if not c.indicators:
            out.add(f"empty block: {c.name}")
        for ind in c.indicators:
            owners.setdefault(ind, []).append(c.name)
    for ind, who in owners.items():
        if len(who) > 1:
            out.add(f"duplicate assignment: {ind} in {', '.join(sorted(who))}")
    if data is not None:
        cols = set(data.columns)
        for c in spec.constructs:
            for ind in c.indicators:
                if ind not in cols:
                    out.add(f"missing indicator: {ind} (construct {c.name})")
    if not cycle:
        path_parents: dict[str, set[str]] = {}
        for p in spec.paths:
            path_parents.setdefault(p.target, set()).add(p.source)
        for h in spec.higher_order:
            path_parents.setdefault(h.name, set()).update(h.components)
        for i in spec.interactions:
            anc = ancestors(ModelSpec(spec.constructs, spec.paths, spec.higher_order), i.target)
            for who in (i.moderator, i.predictor):
                if who not in anc and path_parents.get(who):
                    out.add(f"interaction {i.name}: {who} is neither an ancestor of "
                            f"{i.target} nor exogenous")
    return sorted(out)
