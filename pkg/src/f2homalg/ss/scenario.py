"""Line-oriented scenario files.

A scenario is a sequence of ``[section]`` blocks with one declaration per
line; ``#`` starts a comment.  Sections:

``[gradings]``     ``kind run|fiber|ring``, ``convention motivic|tate|bockstein``, ``tracked NAME``,
                   ``source RUN`` (fiber scenarios), ``base RING`` and ``tower NAME STEM FIL``
                   (Bockstein runs over the presentation of a ring scenario)
``[generators]``   ``NAME STEM FILTRATION [polynomial|exterior|laurent]``
``[relations]``    one relation per line (``lhs`` or ``lhs = rhs``)
``[params]``       ``NAME VALUE`` or ``branch NAME V1 V2 ...``
``[module]``       ``gen NAME STEM FILTRATION [TRACKED...]`` and ``rel RELATION``
``[window]``       ``stems LO HI``, ``filtrations LO HI``, ``tracked NAME LO HI``, each
                   optionally prefixed by ``report``
``[multipliers]``  one algebra element per line
``[rules]``        ``dR SOURCE -> TARGET`` (``d*`` for every page, target ``0`` allowed)
``[pages]``        ``last R``, ``algebra RUN``, ``compare RUN LABEL`` (a map into RUN),
                   ``from RUN LABEL`` (a map from RUN)
``[map NAME]``     ``SOURCE -> TARGET [for VAR in LO..HI]`` (fiber scenarios)
``[closed]``       ``EXPR [for VAR in LO..HI]``, one basis class per line and value: the
                   expected answer in closed form, clipped to the report window
``[annotations]``  ``STEM FILTRATION : TEXT``, facts shown on charts but never computed
``[expect]``       ``stem N = D``, ``einf K1 K2 ... = D``, ``contains K1 K2 ... : LABEL``,
                   ``fiber N = D`` (fiber scenarios), ``dims NAME`` (dimensions per
                   (stem, filtration) agree with another scenario, on each of its branches),
                   ``rank ELEMENT = N`` (E_infinity is free over the element, on N generators),
                   ``branches agree`` or ``branches differ`` (dimensions across the
                   branch assignments of this scenario's own parameters),
                   ``periodic ELEMENT`` (E_infinity dims repeat under the element's degree),
                   ``e2 NAME`` (the first page agrees with the answer of another scenario),
                   ``closed`` (E_infinity dims equal the [closed] families on the report window)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..graded.presentation import GeneratorSymbol, PresentationError, PresentedAlgebra, PresentedModule
from .conventions import KINDS, Convention
from .engine import DifferentialRule, RuleError, Window, check_rule
from .fiber import TableEntry


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


SECTIONS = ("gradings", "generators", "relations", "params", "module", "window",
            "multipliers", "rules", "pages", "closed", "annotations", "expect")
PARITIES = ("polynomial", "exterior", "laurent")
RUN_KINDS = ("run", "fiber", "ring")


@dataclass
class Expectation:
    kind: str
    key: tuple
    value: object
    line: Optional[int] = None

    def __str__(self) -> str:
        if self.kind in ("dims", "branches", "periodic", "e2"):
            return f"{self.kind} {self.key[0]}"
        if self.kind == "closed":
            return "closed"
        if self.kind == "rank":
            return f"rank {self.key[0]} = {self.value}"
        if self.kind == "contains":
            return f"contains {' '.join(map(str, self.key))} : {self.value}"
        return f"{self.kind} {' '.join(map(str, self.key))} = {self.value}"


@dataclass
class Scenario:
    name: str = ""
    kind: str = "run"
    convention: str = "motivic"
    tracked: list = field(default_factory=list)
    source: Optional[str] = None
    base: Optional[str] = None
    tower: Optional[GeneratorSymbol] = None
    generators: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    branches: dict = field(default_factory=dict)
    module_gens: list = field(default_factory=list)
    module_relations: list = field(default_factory=list)
    window: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    multipliers: list = field(default_factory=list)
    rules: list = field(default_factory=list)
    last_page: Optional[int] = None
    algebra: Optional[str] = None
    compare: list = field(default_factory=list)
    maps: dict = field(default_factory=dict)
    closed: list = field(default_factory=list)
    annotations: list = field(default_factory=list)  # (stem, filtration, text)
    expect: list = field(default_factory=list)

    # structural equality ignores line numbers
    def structure(self) -> tuple:
        rules = tuple((r.page, r.source, r.target) for r in self.rules)
        maps = tuple((n, tuple((e.source, e.target, e.var, e.lo, e.hi) for e in es))
                     for n, es in self.maps.items())
        exp = tuple((e.kind, e.key, e.value) for e in self.expect)
        gens = tuple((g.name, g.stem, g.filtration, g.parity) for g in self.generators)
        tower = (self.tower.name, self.tower.stem, self.tower.filtration) if self.tower else None
        return (self.name, self.kind, self.convention, tuple(self.tracked), self.source,
                self.base, tower, gens,
                tuple(self.relations), tuple(sorted(self.params.items())),
                tuple(sorted((k, tuple(v)) for k, v in self.branches.items())),
                tuple((n, tuple(k)) for n, k in self.module_gens), tuple(self.module_relations),
                tuple(sorted(self.window.items())), tuple(sorted(self.report.items())),
                tuple(self.multipliers), rules, self.last_page, self.algebra,
                tuple(tuple(c) for c in self.compare), maps,
                tuple((e.source, e.var, e.lo, e.hi) for e in self.closed),
                tuple(self.annotations), exp)

    # construction -----------------------------------------------------------
    def algebra_space(self, params: Optional[dict] = None) -> PresentedAlgebra:
        p = dict(self.params)
        p.update(params or {})
        return PresentedAlgebra(self.generators, self.relations, tracked=self.tracked, params=p,
                                name=self.name)

    def space(self, params: Optional[dict] = None):
        alg = self.algebra_space(params)
        if not self.module_gens:
            return alg
        return PresentedModule(alg, self.module_gens, self.module_relations, name=self.name)

    def make_convention(self, space) -> Convention:
        tr = self.tracked[-1] if self.convention != "motivic" and self.tracked else None
        return Convention.for_space(self.convention, space, tr)

    def _window(self, spec: dict) -> Optional[Window]:
        if "stems" not in spec:
            return None
        tr = tuple(spec.get(f"tracked {t}", (0, 0)) for t in self.tracked)
        return Window(tuple(spec["stems"]), tr, tuple(spec["filtrations"]) if "filtrations" in spec else None)

    def box(self) -> Window:
        w = self._window(self.window)
        if w is None:
            raise ScenarioError(f"{self.name}: window needs a stems line")
        return w

    def report_window(self) -> Optional[Window]:
        return self._window(self.report)


_RULE = re.compile(r"^d(\d+|\*)\s+(.+?)\s*->\s*(.+)$")
_CLOSED = re.compile(r"^(.+?)(?:\s+for\s+([a-z])\s+in\s+(-?\d+)\.\.(-?\d+))?$")
_MAP = re.compile(r"^(.+?)\s*->\s*(.+?)(?:\s+for\s+([a-z])\s+in\s+(-?\d+)\.\.(-?\d+))?$")


def _ints(parts, line, n=None):
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise ScenarioError(f"expected integers, got {' '.join(parts)!r}", line) from None
    if n is not None and len(vals) != n:
        raise ScenarioError(f"expected {n} integers, got {len(vals)}", line)
    return vals


def parse_scenario(text: str, name: str = "") -> Scenario:
    sc = Scenario(name=name)
    section = None
    seen = set()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[([a-z]+)(?:\s+([A-Za-z0-9_]+))?\]", line)
        if m:
            sec, arg = m.group(1), m.group(2)
            if sec == "map":
                if not arg:
                    raise ScenarioError("map section needs a name", ln)
                if arg in sc.maps:
                    raise ScenarioError(f"duplicate map {arg}", ln)
                sc.maps[arg] = []
                section = ("map", arg)
                continue
            if sec not in SECTIONS or arg:
                raise ScenarioError(f"unknown section [{line[1:-1]}]", ln)
            if sec in seen:
                raise ScenarioError(f"duplicate section [{sec}]", ln)
            seen.add(sec)
            section = sec
            continue
        if section is None:
            raise ScenarioError("declaration outside any section", ln)
        _parse_line(sc, section, line, ln)
    if "gradings" not in seen:
        raise ScenarioError("no gradings section")
    _validate(sc)
    return sc


def _parse_line(sc: Scenario, section, line: str, ln: int) -> None:
    parts = line.split()
    if section == "gradings":
        key, rest = parts[0], parts[1:]
        if key == "kind" and len(rest) == 1 and rest[0] in RUN_KINDS:
            sc.kind = rest[0]
        elif key == "convention" and len(rest) == 1:
            if rest[0] not in KINDS:
                raise ScenarioError(f"unknown convention {rest[0]!r}", ln)
            sc.convention = rest[0]
        elif key == "tracked" and len(rest) == 1:
            sc.tracked.append(rest[0])
        elif key == "source" and len(rest) == 1:
            sc.source = rest[0]
        elif key == "base" and len(rest) == 1:
            sc.base = rest[0]
        elif key == "tower" and len(rest) == 3:
            stem, fil = _ints(rest[1:], ln)
            sc.tower = GeneratorSymbol(rest[0], stem, fil, "polynomial")
        elif key == "name" and len(rest) == 1:
            sc.name = rest[0]
        else:
            raise ScenarioError(f"unknown gradings key {line!r}", ln)
    elif section == "generators":
        if len(parts) not in (3, 4):
            raise ScenarioError("generator line is NAME STEM FILTRATION [PARITY]", ln)
        stem, fil = _ints(parts[1:3], ln)
        parity = parts[3] if len(parts) == 4 else "polynomial"
        if parity not in PARITIES:
            raise ScenarioError(f"unknown parity {parity!r}", ln)
        if any(g.name == parts[0] for g in sc.generators):
            raise ScenarioError(f"duplicate generator {parts[0]}", ln)
        sc.generators.append(GeneratorSymbol(parts[0], stem, fil, parity))
    elif section == "relations":
        sc.relations.append(line)
    elif section == "params":
        if parts[0] == "branch":
            if len(parts) < 3:
                raise ScenarioError("branch line is branch NAME V1 V2 ...", ln)
            sc.branches[parts[1]] = _ints(parts[2:], ln)
        elif len(parts) == 2:
            sc.params[parts[0]] = _ints(parts[1:], ln, 1)[0]
        else:
            raise ScenarioError(f"unknown params line {line!r}", ln)
    elif section == "module":
        if parts[0] == "gen" and len(parts) >= 4:
            sc.module_gens.append((parts[1], tuple(_ints(parts[2:], ln))))
        elif parts[0] == "rel" and len(parts) >= 2:
            sc.module_relations.append(line[3:].strip())
        else:
            raise ScenarioError(f"unknown module line {line!r}", ln)
    elif section == "window":
        target = sc.window
        if parts[0] == "report":
            target, parts = sc.report, parts[1:]
        if not parts:
            raise ScenarioError("empty window line", ln)
        if parts[0] in ("stems", "filtrations"):
            target[parts[0]] = tuple(_ints(parts[1:], ln, 2))
        elif parts[0] == "tracked" and len(parts) == 4:
            target[f"tracked {parts[1]}"] = tuple(_ints(parts[2:], ln, 2))
        else:
            raise ScenarioError(f"unknown window key {parts[0]!r}", ln)
    elif section == "multipliers":
        sc.multipliers.append(line)
    elif section == "rules":
        m = _RULE.match(line)
        if not m:
            raise ScenarioError(f"rule must read dR SOURCE -> TARGET, got {line!r}", ln)
        page = None if m.group(1) == "*" else int(m.group(1))
        sc.rules.append(DifferentialRule(page, m.group(2).strip(), m.group(3).strip(), ln))
    elif section == "pages":
        if parts[0] == "last" and len(parts) == 2:
            sc.last_page = _ints(parts[1:], ln, 1)[0]
        elif parts[0] == "algebra" and len(parts) == 2:
            sc.algebra = parts[1]
        elif parts[0] in ("compare", "from") and len(parts) >= 3:
            sc.compare.append((parts[0], parts[1], " ".join(parts[2:])))
        else:
            raise ScenarioError(f"unknown pages key {line!r}", ln)
    elif isinstance(section, tuple):
        m = _MAP.match(line)
        if not m:
            raise ScenarioError(f"map line must read SOURCE -> TARGET, got {line!r}", ln)
        var = m.group(3)
        lo = int(m.group(4)) if var else 0
        hi = int(m.group(5)) if var else 0
        sc.maps[section[1]].append(TableEntry(m.group(1).strip(), m.group(2).strip(), var, lo, hi, ln))
    elif section == "closed":
        m = _CLOSED.match(line)
        var = m.group(2)
        lo = int(m.group(3)) if var else 0
        hi = int(m.group(4)) if var else 0
        sc.closed.append(TableEntry(m.group(1).strip(), "", var, lo, hi, ln))
    elif section == "annotations":
        if ":" not in line:
            raise ScenarioError("annotation line is STEM FILTRATION : TEXT", ln)
        head, text = line.split(":", 1)
        stem, fil = _ints(head.split(), ln, 2)
        sc.annotations.append((stem, fil, text.strip()))
    elif section == "expect":
        sc.expect.append(_parse_expect(line, ln))


def _parse_expect(line: str, ln: int) -> Expectation:
    parts = line.split()
    kind = parts[0]
    if kind == "rank":
        if "=" not in parts or parts.index("=") < 2:
            raise ScenarioError("rank line is rank ELEMENT = N", ln)
        i = parts.index("=")
        return Expectation("rank", (" ".join(parts[1:i]),), _ints(parts[i + 1:], ln, 1)[0], ln)
    if kind in ("dims", "e2"):
        if len(parts) != 2:
            raise ScenarioError(f"{kind} line is {kind} NAME", ln)
        return Expectation(kind, (parts[1],), None, ln)
    if kind == "closed":
        if len(parts) != 1:
            raise ScenarioError("closed takes no arguments", ln)
        return Expectation("closed", (), None, ln)
    if kind == "periodic":
        if len(parts) < 2:
            raise ScenarioError("periodic line is periodic ELEMENT", ln)
        return Expectation("periodic", (" ".join(parts[1:]),), True, ln)
    if kind == "branches":
        if len(parts) != 2 or parts[1] not in ("agree", "differ"):
            raise ScenarioError("branches line is branches agree|differ", ln)
        return Expectation("branches", (parts[1],), None, ln)
    if kind == "contains":
        if ":" not in line:
            raise ScenarioError("contains line is contains K1 K2 ... : LABEL", ln)
        head, label = line.split(":", 1)
        return Expectation("contains", tuple(_ints(head.split()[1:], ln)), label.strip(), ln)
    if kind in ("stem", "einf", "fiber", "page"):
        if "=" not in parts:
            raise ScenarioError(f"{kind} expectation needs '= VALUE'", ln)
        i = parts.index("=")
        return Expectation(kind, tuple(_ints(parts[1:i], ln)), _ints(parts[i + 1:], ln, 1)[0], ln)
    raise ScenarioError(f"unknown expectation {kind!r}", ln)


def _validate(sc: Scenario) -> None:
    if sc.kind == "fiber":
        if not sc.source:
            raise ScenarioError("fiber scenario needs a source run")
        if sorted(sc.maps) != ["f", "g"]:
            raise ScenarioError("fiber scenario needs [map f] and [map g]")
        return
    if sc.kind == "ring" and "stems" not in sc.window:
        raise ScenarioError("ring scenario needs a stems window")
    if (sc.base is None) != (sc.tower is None):
        raise ScenarioError("a Bockstein run needs both base and tower")
    if sc.base is not None:
        if sc.generators or sc.module_gens:
            raise ScenarioError("a Bockstein run takes its presentation from the base")
        if sc.convention != "bockstein":
            raise ScenarioError("a Bockstein run uses the bockstein convention")
        return
    if not sc.generators and not sc.module_gens:
        raise ScenarioError("no generators declared")
    try:
        space = sc.space()
        conv = sc.make_convention(space)
    except (PresentationError, ValueError) as e:
        raise ScenarioError(str(e)) from None
    for rule in sc.rules:
        try:
            check_rule(rule, space, conv, with_line=False)
        except RuleError as e:
            raise ScenarioError(str(e), rule.line) from None
    for k, vals in sc.branches.items():
        if k not in sc.params:
            raise ScenarioError(f"branch coefficient {k} has no pinned value")
        if sc.params[k] not in vals:
            raise ScenarioError(f"pinned value of {k} is not among its branches")


def emit_scenario(sc: Scenario) -> str:
    out = ["[gradings]"]
    if sc.name:
        out.append(f"name {sc.name}")
    out.append(f"kind {sc.kind}")
    out.append(f"convention {sc.convention}")
    out += [f"tracked {t}" for t in sc.tracked]
    if sc.source:
        out.append(f"source {sc.source}")
    if sc.base:
        out.append(f"base {sc.base}")
    if sc.tower:
        out.append(f"tower {sc.tower.name} {sc.tower.stem} {sc.tower.filtration}")
    if sc.generators:
        out += ["", "[generators]"]
        out += [f"{g.name} {g.stem} {g.filtration} {g.parity}" for g in sc.generators]
    if sc.relations:
        out += ["", "[relations]"] + list(sc.relations)
    if sc.params or sc.branches:
        out += ["", "[params]"]
        out += [f"{k} {v}" for k, v in sc.params.items()]
        out += [f"branch {k} {' '.join(map(str, v))}" for k, v in sc.branches.items()]
    if sc.module_gens or sc.module_relations:
        out += ["", "[module]"]
        out += [f"gen {n} {' '.join(map(str, k))}" for n, k in sc.module_gens]
        out += [f"rel {r}" for r in sc.module_relations]
    if sc.window or sc.report:
        out += ["", "[window]"]
        for prefix, spec in (("", sc.window), ("report ", sc.report)):
            for k, v in spec.items():
                if k.startswith("tracked "):
                    out.append(f"{prefix}{k} {v[0]} {v[1]}")
                else:
                    out.append(f"{prefix}{k} {v[0]} {v[1]}")
    if sc.multipliers:
        out += ["", "[multipliers]"] + list(sc.multipliers)
    if sc.rules:
        out += ["", "[rules]"] + [str(r) for r in sc.rules]
    if sc.last_page is not None or sc.algebra or sc.compare:
        out += ["", "[pages]"]
        if sc.last_page is not None:
            out.append(f"last {sc.last_page}")
        if sc.algebra:
            out.append(f"algebra {sc.algebra}")
        out += [f"{how} {r} {label}" for how, r, label in sc.compare]
    for mname, entries in sc.maps.items():
        out += ["", f"[map {mname}]"]
        for e in entries:
            tail = f" for {e.var} in {e.lo}..{e.hi}" if e.var else ""
            out.append(f"{e.source} -> {e.target}{tail}")
    if sc.closed:
        out += ["", "[closed]"]
        out += [e.source + (f" for {e.var} in {e.lo}..{e.hi}" if e.var else "") for e in sc.closed]
    if sc.annotations:
        out += ["", "[annotations]"] + [f"{a} {b} : {t}" for a, b, t in sc.annotations]
    if sc.expect:
        out += ["", "[expect]"] + [str(e) for e in sc.expect]
    return "\n".join(out) + "\n"


def bockstein_scenario(spec: Scenario, base: Scenario) -> Scenario:
    """The run ``spec`` over E_1 = base ⊗ F₂[tower], as a self-contained scenario."""
    if spec.tower is None:
        raise ScenarioError(f"{spec.name}: no tower class declared")
    if any(g.name == spec.tower.name for g in base.generators):
        raise ScenarioError(f"{spec.name}: tower class {spec.tower.name} is already a generator of {base.name}")
    sc = Scenario(name=spec.name, kind="run", convention="bockstein")
    sc.tracked = list(base.tracked) + [spec.tower.name]
    sc.generators = list(base.generators) + [spec.tower]
    sc.relations = list(base.relations)
    sc.params = {**base.params, **spec.params}
    sc.branches = {**base.branches, **spec.branches}
    sc.module_gens = [(n, tuple(k) + (0,)) for n, k in base.module_gens]
    sc.module_relations = list(base.module_relations)
    for attr in ("window", "report", "multipliers", "rules", "last_page", "algebra", "compare",
                 "expect"):
        setattr(sc, attr, getattr(spec, attr))
    for rule in sc.rules:
        try:
            check_rule(rule, sc.space(), sc.make_convention(sc.space()))
        except (RuleError, PresentationError) as e:
            raise ScenarioError(str(e), rule.line) from None
    return sc
