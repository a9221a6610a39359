"""Single-coefficient mutations of scenario files.

A mutation site is an integer coefficient literal inside a polynomial field
of the raw scenario tree. Exponents, fraction parts and bare zeros are not
sites (changing them would alter degrees or divide by zero rather than
perturb a coefficient). Inputs of CONTAINMENT_REPORT checks are not sites
either: such a check prints residues and never fails, so nothing can detect
a change there.
"""

from __future__ import annotations

import copy
import random
import re
from dataclasses import dataclass

from .checks import FAIL, run_checks
from .scenario import ScenarioError, _Loader

# keys whose string values (or lists / maps of strings) are polynomials
POLY_KEYS = frozenset(
    {
        "relations", "classes", "chern", "images", "preimages", "unit", "p", "q", "a", "b",
        "push_unit", "push_tau", "value", "weight", "generators", "elements", "element",
        "top_chern", "expected", "input", "class", "lhs", "rhs", "candidates", "external",
    }
)

_LITERAL = re.compile(r"(?<![A-Za-z0-9_^/.@])(\d+)(?![\d/])")


@dataclass(frozen=True)
class Site:
    path: tuple
    start: int
    end: int
    value: int

    def describe(self) -> str:
        return "/".join(str(p) for p in self.path) + f"@{self.start}"


def _strings(node, path, under_poly):
    if isinstance(node, dict):
        for k, v in node.items():
            yield from _strings(v, path + (k,), under_poly or k in POLY_KEYS)
    elif isinstance(node, list):
        for i, v in enumerate(node):
            yield from _strings(v, path + (i,), under_poly)
    elif isinstance(node, str) and under_poly:
        yield path, node


def mutation_sites(raw: dict) -> list[Site]:
    sites = []
    for section in ("rings", "maps", "operators", "classes", "checks"):
        items = raw.get(section, [])
        for path, text in _strings(items, (section,), False):
            if section == "checks" and items[path[1]].get("kind") == "CONTAINMENT_REPORT":
                continue
            for m in _LITERAL.finditer(text):
                value = int(m.group(1))
                if value:
                    sites.append(Site(path, m.start(1), m.end(1), value))
    return sites


def mutate(raw: dict, site: Site, delta: int) -> dict:
    out = copy.deepcopy(raw)
    node = out
    for key in site.path[:-1]:
        node = node[key]
    text = node[site.path[-1]]
    node[site.path[-1]] = text[: site.start] + str(site.value + delta) + text[site.end :]
    return out


def detects(raw: dict) -> bool:
    """True iff the scenario loads and at least one check FAILs."""
    try:
        sc = _Loader(raw, "<mutant>").load()
    except ScenarioError:
        return False
    return any(r.status == FAIL for r in run_checks(sc).results)


def random_mutations(raw: dict, count: int, seed: int = 0) -> list[tuple[Site, int]]:
    rng = random.Random(seed)
    sites = mutation_sites(raw)
    picks = []
    for _ in range(count):
        site = rng.choice(sites)
        delta = rng.choice((-1, 1))
        if site.value + delta == 0:
            delta = 1
        picks.append((site, delta))
    return picks
