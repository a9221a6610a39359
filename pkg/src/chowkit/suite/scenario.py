"""Scenario files: a JSON tree of rings, maps, classes, operators and checks.

Polynomials are strings in the polynomial grammar. Inside a polynomial,
``@name`` stands for a previously defined class (it is expanded in
parentheses). Sections are resolved in the order rings, maps, operators,
checks, and a ring, map or operator must be defined before it is used.
Classes are resolved when first referenced (their ring must exist by then).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..chowcalc import (
    ChowPresentation,
    QuadraticTransfer,
    RingMap,
    SurjectivePullback,
    excise,
    projective_bundle_presentation,
    weight_class,
)
from ..polyring import (
    DegreeMismatch,
    GradedRing,
    ParseError,
    Polynomial,
    PolyError,
    RationalInIntegerRing,
    RingMismatch,
    UnknownVariable,
)

PARSE_ERROR = "PARSE_ERROR"
UNRESOLVED_NAME = "UNRESOLVED_NAME"
TYPE_MISMATCH = "TYPE_MISMATCH"

CHECK_KINDS = (
    "IDEAL_EQUAL",
    "MEMBER",
    "NOT_MEMBER",
    "PATCHING_DERIVE",
    "MAP_VALID",
    "NZD",
    "PUSHFORWARD_EQ",
    "CLASS_CONSISTENCY",
    "GRADED_COMPONENT",
    "IDENTITY_EQ",
    "CONTAINMENT_REPORT",
)

_CLASS_REF = re.compile(r"@([A-Za-z_][A-Za-z0-9_]*)")


class ScenarioError(Exception):
    def __init__(self, code: str, message: str, location: str = ""):
        self.code = code
        self.message = message
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"{code}{where}: {message}")


@dataclass(frozen=True)
class ClassDef:
    name: str
    ring: str
    value: Polynomial


@dataclass(frozen=True)
class CheckSpec:
    name: str
    kind: str
    args: dict
    dataset: str = ""
    location: str = ""


@dataclass
class Scenario:
    id: str
    description: str = ""
    datasets: dict[str, str] = field(default_factory=dict)
    rings: dict[str, ChowPresentation] = field(default_factory=dict)
    maps: dict[str, RingMap] = field(default_factory=dict)
    map_sources: dict[str, str] = field(default_factory=dict)
    operators: dict[str, Any] = field(default_factory=dict)
    classes: dict[str, ClassDef] = field(default_factory=dict)
    checks: list[CheckSpec] = field(default_factory=list)
    raw: dict = field(default_factory=dict, repr=False)
    path: str = ""

    def definition(self, name: str) -> tuple[str, dict] | None:
        """Raw JSON definition of a named ring, map, operator, class or check."""
        for section in ("rings", "maps", "operators", "classes", "checks"):
            for item in self.raw.get(section, []):
                if item.get("name") == name:
                    return section, item
        return None


class _Loader:
    def __init__(self, raw: dict, path: str):
        self.raw = raw
        self.sc = Scenario(
            id=str(raw.get("scenario") or Path(path).stem),
            description=str(raw.get("description", "")),
            datasets=dict(raw.get("datasets", {})),
            raw=raw,
            path=path,
        )

    # -- helpers -----------------------------------------------------------

    def fail(self, code, msg, loc):
        raise ScenarioError(code, msg, loc)

    def need(self, obj: dict, key: str, loc: str, kind=None):
        if key not in obj:
            self.fail(PARSE_ERROR, f"missing field '{key}'", loc)
        v = obj[key]
        if kind is not None and not isinstance(v, kind):
            self.fail(TYPE_MISMATCH, f"field '{key}' has the wrong type", f"{loc}.{key}")
        return v

    def ring(self, name, loc) -> ChowPresentation:
        if not isinstance(name, str):
            self.fail(TYPE_MISMATCH, "ring reference must be a name", loc)
        if name not in self.sc.rings:
            self.fail(UNRESOLVED_NAME, f"unknown ring '{name}'", loc)
        return self.sc.rings[name]

    def map(self, name, loc) -> RingMap:
        if not isinstance(name, str):
            self.fail(TYPE_MISMATCH, "map reference must be a name", loc)
        if name not in self.sc.maps:
            self.fail(UNRESOLVED_NAME, f"unknown map '{name}'", loc)
        return self.sc.maps[name]

    def operator(self, name, loc):
        if name not in self.sc.operators:
            self.fail(UNRESOLVED_NAME, f"unknown operator '{name}'", loc)
        return self.sc.operators[name]

    def poly(self, text, ring: GradedRing, loc) -> Polynomial:
        if isinstance(text, int) and not isinstance(text, bool):
            text = str(text)
        if not isinstance(text, str):
            self.fail(TYPE_MISMATCH, "polynomial must be a string", loc)

        def expand(m):
            cls = self.class_ref(m.group(1), loc)
            if cls.value.ring != ring:
                self.fail(TYPE_MISMATCH, f"class '@{cls.name}' lives in {cls.value.ring}, not {ring}", loc)
            return f"({cls.value})"

        expanded = _CLASS_REF.sub(expand, text)
        try:
            return ring(expanded)
        except UnknownVariable as e:
            self.fail(UNRESOLVED_NAME, str(e), loc)
        except RationalInIntegerRing as e:
            self.fail(TYPE_MISMATCH, str(e), loc)
        except ParseError as e:
            self.fail(PARSE_ERROR, f"{e} in '{text}'", loc)

    def class_ref(self, name: str, loc: str) -> ClassDef:
        """Classes resolve on first use, so rings may be built from them."""
        if name in self.sc.classes:
            return self.sc.classes[name]
        if name not in self.class_items:
            self.fail(UNRESOLVED_NAME, f"unknown class '@{name}'", loc)
        if name in self.resolving:
            self.fail(UNRESOLVED_NAME, f"class '@{name}' depends on itself", loc)
        self.resolving.add(name)
        item, cloc = self.class_items[name]
        self.sc.classes[name] = self.class_def(name, item, cloc)
        self.resolving.discard(name)
        return self.sc.classes[name]

    def polys(self, texts, ring, loc) -> tuple[Polynomial, ...]:
        if not isinstance(texts, list):
            self.fail(TYPE_MISMATCH, "expected a list of polynomials", loc)
        return tuple(self.poly(t, ring, f"{loc}[{i}]") for i, t in enumerate(texts))

    def section(self, key):
        items = self.raw.get(key, [])
        if not isinstance(items, list):
            self.fail(TYPE_MISMATCH, f"'{key}' must be a list", key)
        for i, item in enumerate(items):
            loc = f"{key}[{i}]"
            if not isinstance(item, dict):
                self.fail(TYPE_MISMATCH, "entry must be an object", loc)
            name = self.need(item, "name", loc, str)
            loc = f"{key}[{i}]({name})"
            yield name, item, loc

    def define(self, table: dict, name, value, loc):
        if name in table:
            self.fail(TYPE_MISMATCH, f"duplicate name '{name}'", loc)
        table[name] = value

    # -- sections ----------------------------------------------------------

    def load(self) -> Scenario:
        self.class_items = {}
        self.resolving = set()
        for name, item, loc in self.section("classes"):
            if name in self.class_items:
                self.fail(TYPE_MISMATCH, f"duplicate name '{name}'", loc)
            self.class_items[name] = (item, loc)
        for name, item, loc in self.section("rings"):
            self.define(self.sc.rings, name, self.ring_def(name, item, loc), loc)
        for name, item, loc in self.section("maps"):
            self.define(self.sc.maps, name, self.map_def(name, item, loc), loc)
            self.sc.map_sources[name] = item["source"]
        for name, item, loc in self.section("operators"):
            self.define(self.sc.operators, name, self.operator_def(name, item, loc), loc)
        for name, item, loc in self.section("classes"):
            self.class_ref(name, loc)
        seen = set()
        for name, item, loc in self.section("checks"):
            if name in seen:
                self.fail(TYPE_MISMATCH, f"duplicate check '{name}'", loc)
            seen.add(name)
            self.sc.checks.append(self.check_def(name, item, loc))
        return self.sc

    def ring_def(self, name, item, loc) -> ChowPresentation:
        docs = item.get("docs", {})
        if "excise" in item:
            ex = self.need(item, "excise", loc, dict)
            base = self.ring(self.need(ex, "from", f"{loc}.excise"), f"{loc}.excise.from")
            classes = self.polys(ex.get("classes", []), base.ring, f"{loc}.excise.classes")
            try:
                return excise(base, classes, name)
            except PolyError as e:
                self.fail(TYPE_MISMATCH, str(e), f"{loc}.excise")
        if "bundle" in item:
            b = self.need(item, "bundle", loc, dict)
            base = self.ring(self.need(b, "base", f"{loc}.bundle"), f"{loc}.bundle.base")
            chern = self.polys(b.get("chern", []), base.ring, f"{loc}.bundle.chern")
            try:
                return projective_bundle_presentation(base, chern, b.get("h", "h"), name)
            except (PolyError, ValueError) as e:
                self.fail(TYPE_MISMATCH, str(e), f"{loc}.bundle")
        spec = self.need(item, "ring", loc, str)
        try:
            ring = GradedRing.parse(spec)
        except (PolyError, ValueError) as e:
            self.fail(PARSE_ERROR, str(e), f"{loc}.ring")
        rels = self.polys(item.get("relations", []), ring, f"{loc}.relations")
        try:
            pres = ChowPresentation.build(name, ring, rels)
        except DegreeMismatch as e:
            self.fail(TYPE_MISMATCH, str(e), f"{loc}.relations")
        return ChowPresentation(name, pres.ring, pres.relations, dict(docs))

    def map_def(self, name, item, loc) -> RingMap:
        source = self.ring(self.need(item, "source", loc), f"{loc}.source")
        target = self.ring(self.need(item, "target", loc), f"{loc}.target")
        images = item.get("images", {})
        if not isinstance(images, dict):
            self.fail(TYPE_MISMATCH, "images must map variable names to polynomials", f"{loc}.images")
        parsed = {}
        for var, text in images.items():
            if var not in source.ring.names:
                self.fail(UNRESOLVED_NAME, f"'{var}' is not a variable of {source.name}", f"{loc}.images.{var}")
            parsed[var] = self.poly(text, target.ring, f"{loc}.images.{var}")
        try:
            return RingMap.from_mapping(source.ring, target, parsed, name)
        except (DegreeMismatch, RingMismatch) as e:
            self.fail(TYPE_MISMATCH, str(e), f"{loc}.images")
        except ValueError as e:
            self.fail(UNRESOLVED_NAME, str(e), f"{loc}.images")

    def operator_def(self, name, item, loc):
        shape = self.need(item, "shape", loc, str)
        if shape == "SURJECTIVE_PULLBACK":
            ambient = self.ring(self.need(item, "ambient", loc), f"{loc}.ambient")
            pullback = self.map(self.need(item, "pullback", loc), f"{loc}.pullback")
            if pullback.source != ambient.ring:
                self.fail(TYPE_MISMATCH, "pullback must start at the ambient ring", f"{loc}.pullback")
            unit = self.poly(self.need(item, "unit", loc), ambient.ring, f"{loc}.unit")
            pre = self.need(item, "preimages", loc, dict)
            preimages = {}
            for var, text in pre.items():
                if var not in pullback.target.ring.names:
                    self.fail(UNRESOLVED_NAME, f"'{var}' is not a variable of {pullback.target.name}", f"{loc}.preimages.{var}")
                preimages[var] = self.poly(text, ambient.ring, f"{loc}.preimages.{var}")
            return SurjectivePullback(ambient, pullback, unit, preimages)
        if shape == "QUADRATIC_TRANSFER":
            down = self.ring(self.need(item, "down", loc), f"{loc}.down")
            pullback = self.map(self.need(item, "pullback", loc), f"{loc}.pullback")
            if pullback.source != down.ring:
                self.fail(TYPE_MISMATCH, "pullback must start at the downstairs ring", f"{loc}.pullback")
            R = down.ring
            tau = self.need(item, "tau", loc, str)
            if tau not in pullback.target.ring.names:
                self.fail(UNRESOLVED_NAME, f"'{tau}' is not an upstairs variable", f"{loc}.tau")
            rel = self.need(item, "tau_relation", loc, dict)
            p = self.poly(self.need(rel, "p", f"{loc}.tau_relation"), R, f"{loc}.tau_relation.p")
            q = self.poly(self.need(rel, "q", f"{loc}.tau_relation"), R, f"{loc}.tau_relation.q")
            cogens = {}
            for var, ab in self.need(item, "cogenerators", loc, dict).items():
                cloc = f"{loc}.cogenerators.{var}"
                if not isinstance(ab, dict):
                    self.fail(TYPE_MISMATCH, "cogenerator must be {a, b}", cloc)
                cogens[var] = (
                    self.poly(self.need(ab, "a", cloc), R, f"{cloc}.a"),
                    self.poly(self.need(ab, "b", cloc), R, f"{cloc}.b"),
                )
            unit = self.poly(self.need(item, "push_unit", loc), R, f"{loc}.push_unit")
            ptau = self.poly(self.need(item, "push_tau", loc), R, f"{loc}.push_tau")
            return QuadraticTransfer(down, pullback, tau, (p, q), cogens, unit, ptau)
        self.fail(TYPE_MISMATCH, f"unknown operator shape '{shape}'", f"{loc}.shape")

    def class_def(self, name, item, loc) -> ClassDef:
        ring_name = self.need(item, "ring", loc, str)
        if "[" in ring_name:
            # a bare ring spec, for classes used to build a presentation's own relations
            try:
                ring = GradedRing.parse(ring_name)
            except (PolyError, ValueError) as e:
                self.fail(PARSE_ERROR, str(e), f"{loc}.ring")
        else:
            ring = self.ring(ring_name, f"{loc}.ring").ring
        if "weight" in item:
            chars = self.polys(item["weight"], ring, f"{loc}.weight")
            for i, ch in enumerate(chars):
                if ch and ch.degree() != 1:
                    self.fail(TYPE_MISMATCH, "weight characters must be linear", f"{loc}.weight[{i}]")
            value = weight_class(chars, ring)
        else:
            value = self.poly(self.need(item, "value", loc), ring, f"{loc}.value")
        if not value.is_homogeneous():
            self.fail(TYPE_MISMATCH, f"class {name} is not homogeneous", loc)
        return ClassDef(name, ring_name, value)

    # -- checks ------------------------------------------------------------

    def chain(self, names, loc) -> list[RingMap]:
        if not isinstance(names, list):
            self.fail(TYPE_MISMATCH, "map chain must be a list", loc)
        maps = [self.map(n, f"{loc}[{i}]") for i, n in enumerate(names)]
        for i in range(1, len(maps)):
            if maps[i].source != maps[i - 1].target.ring:
                self.fail(TYPE_MISMATCH, f"map '{names[i]}' does not compose with '{names[i - 1]}'", f"{loc}[{i}]")
        return maps

    def side(self, item, key, ring: ChowPresentation, loc):
        """A polynomial, optionally pushed through a chain of maps ending in ``ring``."""
        maps = self.chain(item.get(f"{key}_maps", []), f"{loc}.{key}_maps")
        start = maps[0].source if maps else ring.ring
        if maps and maps[-1].target.ring != ring.ring:
            self.fail(TYPE_MISMATCH, f"{key}_maps do not end in {ring.name}", f"{loc}.{key}_maps")
        value = self.poly(self.need(item, key, loc), start, f"{loc}.{key}")
        return value, maps

    def check_def(self, name, item, loc) -> CheckSpec:
        kind = self.need(item, "kind", loc, str)
        if kind not in CHECK_KINDS:
            self.fail(TYPE_MISMATCH, f"unknown check kind '{kind}'", f"{loc}.kind")
        a: dict[str, Any] = {}
        if kind in ("IDEAL_EQUAL", "MEMBER", "NOT_MEMBER", "NZD", "GRADED_COMPONENT", "IDENTITY_EQ"):
            a["ring"] = self.ring(self.need(item, "ring", loc), f"{loc}.ring")
        R = a.get("ring")

        if kind == "IDEAL_EQUAL":
            if "other" in item:
                a["other"] = self.ring(item["other"], f"{loc}.other")
                if a["other"].ring != R.ring:
                    self.fail(TYPE_MISMATCH, "compared presentations must share a ring", f"{loc}.other")
            else:
                a["generators"] = self.polys(self.need(item, "generators", loc), R.ring, f"{loc}.generators")
        elif kind in ("MEMBER", "NOT_MEMBER"):
            a["elements"] = self.polys(self.need(item, "elements", loc), R.ring, f"{loc}.elements")
        elif kind == "NZD":
            a["element"] = self.poly(self.need(item, "element", loc), R.ring, f"{loc}.element")
            a["expect"] = self.flag(item, "expect", True, loc)
        elif kind == "PATCHING_DERIVE":
            op = self.map(self.need(item, "open", loc), f"{loc}.open")
            cl = self.map(self.need(item, "closed", loc), f"{loc}.closed")
            if op.source != cl.source:
                self.fail(TYPE_MISMATCH, "restrictions must share their source", f"{loc}.closed")
            a["open"], a["closed"] = op, cl
            a["top_chern"] = self.poly(self.need(item, "top_chern", loc), cl.target.ring, f"{loc}.top_chern")
            if "expected_ring" in item:
                exp = self.ring(item["expected_ring"], f"{loc}.expected_ring")
                if exp.ring != op.source:
                    self.fail(TYPE_MISMATCH, "expected presentation must be on the generator ring", f"{loc}.expected_ring")
                a["expected"] = exp.relations.generators
            else:
                a["expected"] = self.polys(self.need(item, "expected", loc), op.source, f"{loc}.expected")
        elif kind == "MAP_VALID":
            m = self.map(self.need(item, "map", loc), f"{loc}.map")
            a["map"] = m
            rel_name = item.get("relations", self.sc.map_sources[item["map"]])
            rels = self.ring(rel_name, f"{loc}.relations")
            if rels.ring != m.source:
                self.fail(TYPE_MISMATCH, "relations must live on the map's source", f"{loc}.relations")
            a["relations"] = rels
            a["expect"] = self.flag(item, "expect", True, loc)
        elif kind == "PUSHFORWARD_EQ":
            op = self.operator(self.need(item, "operator", loc), f"{loc}.operator")
            up = op.stratum.ring if isinstance(op, SurjectivePullback) else op.up.ring
            down = op.ambient.ring if isinstance(op, SurjectivePullback) else op.down.ring
            a["operator"] = op
            a["input"] = self.poly(self.need(item, "input", loc), up, f"{loc}.input")
            a["expected"] = self.poly(self.need(item, "expected", loc), down, f"{loc}.expected")
        elif kind == "CLASS_CONSISTENCY":
            restr = self.need(item, "restrictions", loc, list)
            pairs = []
            source = None
            for i, r in enumerate(restr):
                rloc = f"{loc}.restrictions[{i}]"
                m = self.map(self.need(r, "map", rloc), f"{rloc}.map")
                if source is not None and m.source != source:
                    self.fail(TYPE_MISMATCH, "restrictions must share their source", f"{rloc}.map")
                source = m.source
                pairs.append((m, self.poly(self.need(r, "expected", rloc), m.target.ring, f"{rloc}.expected")))
            if source is None:
                self.fail(PARSE_ERROR, "at least one restriction is needed", f"{loc}.restrictions")
            a["class"] = self.poly(self.need(item, "class", loc), source, f"{loc}.class")
            a["restrictions"] = pairs
        elif kind == "GRADED_COMPONENT":
            if "other" in item:
                a["other"] = self.ring(item["other"], f"{loc}.other")
                if a["other"].ring != R.ring:
                    self.fail(TYPE_MISMATCH, "compared presentations must share a ring", f"{loc}.other")
                degrees = self.need(item, "degrees", loc, list)
                if not all(isinstance(d, int) and d >= 0 for d in degrees):
                    self.fail(TYPE_MISMATCH, "degrees must be nonnegative integers", f"{loc}.degrees")
                a["degrees"] = degrees
            else:
                comps = []
                for i, c in enumerate(self.need(item, "components", loc, list)):
                    cloc = f"{loc}.components[{i}]"
                    d = self.need(c, "degree", cloc, int)
                    free = self.need(c, "free", cloc, int)
                    tors = c.get("torsion", [])
                    if not isinstance(tors, list) or not all(isinstance(t, int) and t > 1 for t in tors):
                        self.fail(TYPE_MISMATCH, "torsion must list invariant factors > 1", f"{cloc}.torsion")
                    comps.append((d, free, tuple(tors)))
                a["components"] = comps
            if not R.relations.homogeneous:
                self.fail(TYPE_MISMATCH, "graded components need homogeneous relations", f"{loc}.ring")
        elif kind == "IDENTITY_EQ":
            a["lhs"], a["lhs_maps"] = self.side(item, "lhs", R, loc)
            a["rhs"], a["rhs_maps"] = self.side(item, "rhs", R, loc)
            a["modulo"] = self.flag(item, "modulo", False, loc)
        elif kind == "CONTAINMENT_REPORT":
            R = self.ring(self.need(item, "ring", loc), f"{loc}.ring")
            a["ring"] = R
            if "other" in item:
                a["other"] = self.ring(item["other"], f"{loc}.other")
                if a["other"].ring != R.ring:
                    self.fail(TYPE_MISMATCH, "compared presentations must share a ring", f"{loc}.other")
                a["external"] = self.polys(item.get("external", []), R.ring, f"{loc}.external")
            else:
                a["lhs"], a["lhs_maps"] = self.side(item, "lhs", R, loc)
                cands = self.need(item, "candidates", loc, dict)
                a["candidates"] = {
                    label: self.poly(text, R.ring, f"{loc}.candidates.{label}") for label, text in cands.items()
                }
                a["modulo"] = self.flag(item, "modulo", False, loc)
        return CheckSpec(name, kind, a, str(item.get("dataset", "")), loc)

    def flag(self, item, key, default, loc) -> bool:
        v = item.get(key, default)
        if not isinstance(v, bool):
            self.fail(TYPE_MISMATCH, f"'{key}' must be true or false", f"{loc}.{key}")
        return v


def parse_scenario(text: str, path: str = "<string>") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(PARSE_ERROR, e.msg, f"{path}:{e.lineno}:{e.colno}") from None
    if not isinstance(raw, dict):
        raise ScenarioError(PARSE_ERROR, "scenario must be a JSON object", path)
    return _Loader(raw, path).load()


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(PARSE_ERROR, f"cannot read scenario: {e.strerror}", str(path)) from None
    return parse_scenario(text, str(path))
