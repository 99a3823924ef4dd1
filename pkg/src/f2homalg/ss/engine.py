"""Pages, differentials and page turning for multiplicative spectral sequences over F₂.

Every page E_r is stored degreewise inside E_2: at each key the cycles Z_r and
boundaries B_r are subspaces of the E_2 basis, and E_r = Z_r / B_r has a
canonical basis of representatives (fully reduced modulo B_r, in echelon form).

d_r is solved for, never guessed.  Its matrix entries are unknowns of one
linear system over F₂ whose equations are the declared rules, d(1) = 0,
"targets are cycles", the Leibniz rule (or the module rule over an algebra
run), and compatibility with comparison maps of spectral sequences.  An entry
that the system leaves free is an underdetermined differential.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from ..gf2 import Subspace, int_rref
from ..graded.degrees import key_add, key_sub
from ..graded.presentation import PresentationError, PresentedModule, bits, monomial_basis
from .conventions import Convention


class SSError(Exception):
    pass


class RuleError(SSError):
    pass


class UnderdeterminedError(SSError):
    def __init__(self, page: int, key, label: str):
        super().__init__(f"d_{page}({label}) at {key} is not determined by the rules")
        self.page, self.key, self.label = page, key, label


class InconsistentRulesError(SSError):
    pass


class DSquaredError(SSError):
    pass


class WindowError(SSError):
    pass


# windows --------------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Box of keys: a stem range and one range per tracked coordinate (inclusive)."""

    stems: tuple
    tracked: tuple = ()
    filtrations: Optional[tuple] = None

    def contains(self, key) -> bool:
        if not self.stems[0] <= key[0] <= self.stems[1]:
            return False
        if self.filtrations is not None and not self.filtrations[0] <= key[1] <= self.filtrations[1]:
            return False
        return all(lo <= key[2 + i] <= hi for i, (lo, hi) in enumerate(self.tracked))


# rules ----------------------------------------------------------------------

@dataclass(frozen=True)
class DifferentialRule:
    """d_page(source) = target; page None means the rule holds on every page (target 0)."""

    page: Optional[int]
    source: str
    target: str
    line: Optional[int] = None

    def __str__(self) -> str:
        return f"d{self.page if self.page is not None else '*'} {self.source} -> {self.target}"


@dataclass
class _Rule:
    rule: DifferentialRule
    skey: tuple
    svec: int
    tvec: int


def check_rule(rule: DifferentialRule, space, conv: Convention, with_line: bool = True) -> _Rule:
    """Parse a rule and apply the bidegree law; raises RuleError on violation."""
    where = f" (line {rule.line})" if rule.line and with_line else ""
    try:
        skey, svec = space.parse(rule.source)
    except PresentationError as e:
        raise RuleError(f"{rule}{where}: {e}") from None
    if skey is None or not svec:
        raise RuleError(f"{rule}{where}: source is zero")
    if rule.target.strip() == "0":
        return _Rule(rule, skey, svec, 0)
    if rule.page is None:
        raise RuleError(f"{rule}{where}: only zero rules may hold on every page")
    try:
        tkey, tvec = space.parse(rule.target)
    except PresentationError as e:
        raise RuleError(f"{rule}{where}: {e}") from None
    if not conv.valid_page(rule.page):
        raise RuleError(f"{rule}{where}: no page {rule.page} in the {conv.kind} convention")
    want = conv.delta(rule.page)
    if tkey is not None and key_sub(tkey, skey) != want:
        raise RuleError(f"{rule}{where}: bidegree law violated, shift {key_sub(tkey, skey)} "
                        f"but d_{rule.page} shifts by {want}")
    return _Rule(rule, skey, svec, tvec)


# one degree of one page -----------------------------------------------------

class KeyPage:
    """E_r at one key: boundaries B and representatives of Z/B, all as E_2 bitsets."""

    __slots__ = ("n", "bound", "reps", "_rows")

    def __init__(self, n: int, bound: Subspace, reps: Sequence[int]):
        self.n = n
        self.bound = bound
        self.reps = list(reps)
        self._rows: dict[int, tuple[int, int]] = {}
        for v in bound.basis():
            self._rows[v.bit_length() - 1] = (v, 0)
        for i, v in enumerate(self.reps):
            p = v.bit_length() - 1
            if not v or p in self._rows:
                raise SSError("representatives are not reduced modulo boundaries")
            self._rows[p] = (v, 1 << i)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, v: int) -> Optional[int]:
        """Coordinates of a cycle over the representatives; None if v is not a cycle."""
        tag = 0
        for p, (row, t) in self._rows.items():
            if v >> p & 1:
                v ^= row
                tag ^= t
        return None if v else tag

    def lift(self, tag: int) -> int:
        v = 0
        for i in bits(tag):
            v ^= self.reps[i]
        return v


def _canonical_reps(bound: Subspace, cycles: Sequence[int]) -> list[int]:
    red = [bound.reduce(z) for z in cycles]
    reps = int_rref(v for v in red if v)
    return sorted(reps)


# pages ----------------------------------------------------------------------

@dataclass
class Page:
    """E_r of one spectral sequence over a box of keys."""

    space: object
    convention: Convention
    r: int
    window: Window
    data: dict
    certified: set

    def dim(self, key) -> int:
        kp = self.data.get(tuple(key))
        return kp.dim if kp else 0

    def basis(self, key) -> list[str]:
        kp = self.data.get(tuple(key))
        if kp is None:
            return []
        return [self.space.label(key, v) for v in kp.reps]

    def keys(self) -> list:
        return sorted(k for k, kp in self.data.items() if kp.dim)

    def is_certified(self, key) -> bool:
        key = tuple(key)
        return key in self.certified or (self.window.contains(key) and key not in self.data)


@dataclass
class PageDifferential:
    """d_r on one page: per source key, the target coordinates of each representative."""

    r: int
    values: dict = field(default_factory=dict)      # key -> list[int] (tags in E_r(key + δ))
    determined: dict = field(default_factory=dict)  # key -> list[bool]
    reasons: dict = field(default_factory=dict)     # (key, i) -> str

    def rank(self, key) -> int:
        return len(int_rref(self.values.get(tuple(key), [])))


@dataclass
class AuditEntry:
    page: int
    source_key: tuple
    source: str
    target: str
    reason: str

    def __str__(self) -> str:
        return f"d{self.page}({self.source}) = {self.target}  [{self.reason}]"


@dataclass
class RunResult:
    name: str
    space: object
    convention: Convention
    pages: dict
    differentials: dict
    final: Page
    audit: list
    multipliers: list
    report: Optional[Window] = None
    no_room: list = field(default_factory=list)
    accounting: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def last_page(self) -> int:
        return max(self.differentials) if self.differentials else self.convention.first_page - 1

    def einf(self, key) -> list[str]:
        key = tuple(key)
        if not self.final.is_certified(key):
            raise WindowError(f"{key} is not certified on E_infinity")
        return self.final.basis(key)

    def einf_dims(self, region: Optional[Window] = None) -> dict:
        region = region or self.report
        out = {}
        for k in self.final.keys():
            if region is None or region.contains(k):
                if not self.final.is_certified(k):
                    raise WindowError(f"{k} is not certified on E_infinity")
                out[k] = self.final.dim(k)
        return out

    def stem_totals(self, stems: Sequence[int], region: Optional[Window] = None) -> dict:
        dims = self.einf_dims(region)
        return {n: sum(d for k, d in dims.items() if k[0] == n) for n in stems}

    def page_dims(self, r: int, region: Optional[Window] = None) -> dict:
        page = self.pages[r] if r in self.pages else self.final
        region = region or self.report
        return {k: page.dim(k) for k in page.keys() if region is None or region.contains(k)}

    def killed(self) -> list:
        return [a for a in self.audit]


def e2_page(space, conv: Convention, window: Window) -> Page:
    basis = monomial_basis(space, window.stems, window.filtrations, list(window.tracked))
    data = {}
    for k, b in basis.items():
        n = len(b)
        data[k] = KeyPage(n, Subspace(n), [1 << i for i in range(n)])
    return Page(space, conv, conv.first_page, window, data, set(data))


# the solver -----------------------------------------------------------------

class _System:
    """Incremental elimination of affine equations; bit 0 is the constant."""

    def __init__(self):
        self.piv: dict[int, int] = {}
        self.conflict: Optional[str] = None

    def add(self, row: int, origin) -> None:
        while row > 1:
            hb = row.bit_length() - 1
            p = self.piv.get(hb)
            if p is None:
                self.piv[hb] = row
                return
            row ^= p
        if row == 1 and self.conflict is None:
            self.conflict = origin() if callable(origin) else origin

    def solve(self) -> dict:
        expr: dict[int, int] = {}
        for hb in sorted(self.piv):
            row = self.piv[hb]
            e = row & 1
            for q in bits(row >> 1):
                q += 1
                if q != hb:
                    e ^= expr.get(q, 1 << q)
            expr[hb] = e
        return expr


@dataclass
class AlgebraContext:
    """The algebra run a module spectral sequence is a module over."""

    run: RunResult


@dataclass
class Comparison:
    """A map of spectral sequences from this run to an already computed run."""

    run: RunResult
    image: Callable  # (key, E_2 vector) -> E_2 vector of the other run at the same key
    name: str = "comparison"
    incoming: bool = False  # True: the map goes from ``run`` into the run being solved


class _PageSolver:
    def __init__(self, page: Page, rules: list, multipliers: list, report: Optional[Window],
                 algebra: Optional[AlgebraContext], comparisons: Sequence[Comparison],
                 is_module: bool):
        self.page = page
        self.conv = page.convention
        self.r = page.r
        self.delta = self.conv.delta(page.r)
        self.rules = rules
        self.mult = multipliers
        self.report = report
        self.algebra = algebra
        self.comparisons = comparisons
        self.is_module = is_module
        self.space = page.space
        self._zero_cache: dict = {}
        self.later: list = []
        self._prod: dict = {}

    # status of keys ------------------------------------------------------
    def known_zero(self, key, page: Optional[Page] = None) -> bool:
        page = page or self.page
        key = tuple(key)
        kp = page.data.get(key)
        if kp is not None:
            return kp.dim == 0 and key in page.certified
        if page.window.contains(key):
            return True
        cache = self._zero_cache if page is self.page else {}
        if key not in cache:
            try:
                cache[key] = page.space.dim(key) == 0
            except PresentationError:
                cache[key] = False
        return cache[key]

    def live(self, key, page: Optional[Page] = None) -> bool:
        page = page or self.page
        key = tuple(key)
        kp = page.data.get(key)
        return kp is not None and kp.dim > 0 and key in page.certified

    def settled(self, key, page: Optional[Page] = None) -> bool:
        """E_r at key is certified (possibly zero)."""
        return self.live(key, page) or self.known_zero(key, page)

    # variables -----------------------------------------------------------
    def build_blocks(self):
        self.blocks = {}
        nxt = 1
        for k in self.page.keys():
            if k not in self.page.certified:
                continue
            t = key_add(k, self.delta)
            if self.live(t):
                dk, dt = self.page.data[k].dim, self.page.data[t].dim
                self.blocks[k] = (nxt, dk, dt)
                nxt += dk * dt
        self.nvar = nxt

    def var(self, k, i, j) -> int:
        base, dk, dt = self.blocks[k]
        return base + i * dt + j

    # equations -----------------------------------------------------------
    def _rows_for(self, tdim):
        return [0] * tdim

    def _d_of(self, rows, k, alpha: int, images: Callable[[int], int]):
        """Add d(Σ_{i∈alpha} rep_i(k)) pushed through a linear map to target coords."""
        if k not in self.blocks:
            return
        base, dk, dt = self.blocks[k]
        for j in range(dt):
            img = images(j)
            if not img:
                continue
            for i in bits(alpha):
                b = 1 << (base + i * dt + j)
                for c in bits(img):
                    rows[c] ^= b

    def _emit(self, sysm, rows, origin):
        for row in rows:
            if row:
                sysm.add(row, origin)

    def product(self, ka, va, kb, vb):
        return self.space.multiply(ka, va, kb, vb)

    def equations(self, sysm: _System):
        pg = self.page
        data = pg.data
        delta = self.delta
        self.hints: dict = {}
        # declared rules
        for rr in self.rules:
            k = rr.skey
            if not self.live(k):
                if self.known_zero(k) or k not in pg.certified:
                    continue
            kp = data[k]
            alpha = kp.coords(rr.svec)
            if alpha is None:
                raise RuleError(f"{rr.rule}: source does not survive to E_{self.r}")
            t = key_add(k, delta)
            if rr.tvec:
                if not self.settled(t):
                    continue
                if self.known_zero(t):
                    continue
                beta = data[t].coords(rr.tvec)
                if beta is None:
                    raise RuleError(f"{rr.rule}: target does not survive to E_{self.r}")
                if not beta:
                    raise RuleError(f"{rr.rule}: target is already zero on E_{self.r}")
                if t in self.blocks:
                    rows = self._rows_for(self.blocks[t][2])
                    self._d_of(rows, t, beta, lambda j: 1 << j)
                    self._emit(sysm, rows, f"{rr.rule} (target is a cycle)")
            else:
                beta = 0
                if not self.settled(t):
                    continue
            if k not in self.blocks:
                if beta:
                    raise InconsistentRulesError(f"{rr.rule}: target is nonzero but E_{self.r} "
                                                 f"has no room for it")
                continue
            dt = self.blocks[k][2]
            rows = self._rows_for(dt)
            self._d_of(rows, k, alpha, lambda j: 1 << j)
            for c in bits(beta):
                rows[c] ^= 1
            if not alpha and beta:
                raise InconsistentRulesError(f"{rr.rule}: source is a boundary on E_{self.r}")
            self._emit(sysm, rows, str(rr.rule))
            if alpha and alpha & (alpha - 1) == 0:
                self.hints.setdefault((k, alpha.bit_length() - 1), f"rule {rr.rule}")
        # sources and targets of later rules are cycles now
        for rr in self.later:
            for key, vec, what in ((rr.skey, rr.svec, "source"),
                                   (key_add(rr.skey, self.conv.delta(rr.rule.page)), rr.tvec, "target")):
                if not vec or key not in self.blocks:
                    continue
                alpha = data[key].coords(vec)
                if alpha is None:
                    raise RuleError(f"{rr.rule}: {what} does not survive to E_{self.r}")
                rows = self._rows_for(self.blocks[key][2])
                self._d_of(rows, key, alpha, lambda j: 1 << j)
                self._emit(sysm, rows, f"{rr.rule} ({what} survives to E_{rr.rule.page})")
            # a later target is not a boundary; linear when it spans its degree
            t = key_add(rr.skey, self.conv.delta(rr.rule.page))
            s = key_sub(t, self.delta)
            if rr.tvec and s in self.blocks and data[t].dim == 1 and data[t].coords(rr.tvec):
                base, dk, dt = self.blocks[s]
                for i in range(dk):
                    sysm.add(1 << (base + i * dt), f"{rr.rule} (target survives to E_{rr.rule.page})")
        # the unit is a permanent cycle
        if not self.is_module:
            u = tuple(self.space.unit_key())
            if u in self.blocks:
                kp = data[u]
                alpha = kp.coords(self.space.vector_of(u, self.space.unit()))
                rows = self._rows_for(self.blocks[u][2])
                self._d_of(rows, u, alpha, lambda j: 1 << j)
                self._emit(sysm, rows, "d(1) = 0")
        if self.is_module:
            self._module_equations(sysm)
        else:
            self._leibniz_equations(sysm)
        for comp in self.comparisons:
            self._comparison_equations(sysm, comp)

    def _leibniz_equations(self, sysm):
        pg, data, delta = self.page, self.page.data, self.delta
        keys = [k for k in pg.keys() if k in pg.certified]
        for a in self.mult:
            if not self.live(a):
                continue
            ad = key_add(a, delta)
            if not self.settled(ad):
                continue
            pa = data[a]
            for b in keys:
                ab = key_add(a, b)
                if not self.settled(ab):
                    continue
                t = key_add(ab, delta)
                if not self.live(t):
                    continue
                bd = key_add(b, delta)
                if not self.settled(bd):
                    continue
                pb = data[b]
                pt = data[t]
                pab = data.get(ab) if self.live(ab) else None
                for i, x in enumerate(pa.reps):
                    for j, y in enumerate(pb.reps):
                        rows = self._rows_for(pt.dim)
                        if pab is not None:
                            _, pv = self.product(a, x, b, y)
                            gamma = pab.coords(pv)
                            if gamma is None:
                                raise SSError(f"product {self.space.label(a, x)} * "
                                              f"{self.space.label(b, y)} is not a cycle on E_{self.r}")
                            self._d_of(rows, ab, gamma, lambda j2: 1 << j2)
                            if gamma and gamma & (gamma - 1) == 0:
                                self.hints.setdefault((ab, gamma.bit_length() - 1),
                                                      f"Leibniz on {self.space.label(a, x)} * "
                                                      f"{self.space.label(b, y)}")
                        if a in self.blocks:
                            pad = data[ad]
                            self._d_of(rows, a, 1 << i, lambda m: self._coords_prod(pt, ad, pad.reps[m], b, y))
                        if b in self.blocks:
                            pbd = data[bd]
                            self._d_of(rows, b, 1 << j, lambda m: self._coords_prod(pt, a, x, bd, pbd.reps[m]))
                        self._emit(sysm, rows, lambda a=a, b=b: f"Leibniz at {a} * {b}")

    def _coords_prod(self, pt: KeyPage, ka, va, kb, vb) -> int:
        ck = (ka, va, kb, vb)
        hit = self._prod.get(ck)
        if hit is None:
            _, v = self.product(ka, va, kb, vb)
            hit = pt.coords(v)
            if hit is None:
                raise SSError(f"product {self.space.label(ka, va) if not self.is_module else ka} "
                              f"is not a cycle on E_{self.r}")
            self._prod[ck] = hit
        return hit

    def _module_equations(self, sysm):
        pg, data, delta = self.page, self.page.data, self.delta
        arun = self.algebra.run
        apage = arun.pages.get(self.r)
        adiff = arun.differentials.get(self.r)
        if apage is None or adiff is None:
            raise SSError(f"algebra run {arun.name!r} has no page {self.r}")
        alg = self.space.algebra
        keys = [k for k in pg.keys() if k in pg.certified]
        for a in self.mult:
            if not self.live(a, apage):
                continue
            ad = key_add(a, delta)
            if not self.settled(ad, apage):
                continue
            pa = apage.data[a]
            avals = adiff.values.get(a)
            adet = adiff.determined.get(a)
            for b in keys:
                ab = key_add(a, b)
                if not self.settled(ab):
                    continue
                t = key_add(ab, delta)
                if not self.live(t):
                    continue
                bd = key_add(b, delta)
                if not self.settled(bd):
                    continue
                pb, pt = data[b], data[t]
                pab = data.get(ab) if self.live(ab) else None
                for i, x in enumerate(pa.reps):
                    if avals is not None and not adet[i]:
                        continue
                    dx = apage.data[ad].lift(avals[i]) if avals is not None else 0
                    for j, y in enumerate(pb.reps):
                        rows = self._rows_for(pt.dim)
                        if pab is not None:
                            _, pv = self.space.act(a, x, b, y)
                            gamma = pab.coords(pv)
                            if gamma is None:
                                raise SSError(f"{alg.label(a, x)} * {self.space.label(b, y)} "
                                              f"is not a cycle on E_{self.r}")
                            self._d_of(rows, ab, gamma, lambda j2: 1 << j2)
                            if gamma and gamma & (gamma - 1) == 0:
                                self.hints.setdefault((ab, gamma.bit_length() - 1),
                                                      f"module rule on {alg.label(a, x)} * "
                                                      f"{self.space.label(b, y)}")
                        if dx:
                            _, pv = self.space.act(ad, dx, b, y)
                            c = pt.coords(pv)
                            if c is None:
                                raise SSError(f"d({alg.label(a, x)}) * {self.space.label(b, y)} "
                                              f"is not a cycle on E_{self.r}")
                            for cc in bits(c):
                                rows[cc] ^= 1
                        if b in self.blocks:
                            pbd = data[bd]
                            self._d_of(rows, b, 1 << j,
                                       lambda m: self._coords_act(pt, a, x, bd, pbd.reps[m]))
                        self._emit(sysm, rows, lambda a=a, b=b: f"module rule at {a} * {b}")

    def _coords_act(self, pt, ka, va, kb, vb):
        ck = ("act", ka, va, kb, vb)
        hit = self._prod.get(ck)
        if hit is None:
            _, v = self.space.act(ka, va, kb, vb)
            hit = pt.coords(v)
            if hit is None:
                raise SSError(f"module product is not a cycle on E_{self.r}")
            self._prod[ck] = hit
        return hit

    def _incoming_equations(self, sysm, comp: Comparison):
        srun = comp.run
        spage = srun.pages.get(self.r)
        sdiff = srun.differentials.get(self.r)
        if spage is None or sdiff is None:
            raise SSError(f"comparison source {srun.name!r} has no page {self.r}")
        data, delta = self.page.data, self.delta
        other = _PageSolver(spage, [], [], None, None, (), True)
        for k in list(self.blocks):
            t = key_add(k, delta)
            if not (other.live(k) and other.settled(t)):
                continue
            svals, sdet = sdiff.values.get(k), sdiff.determined.get(k)
            pk, pt = data[k], data[t]
            for i, rep in enumerate(spage.data[k].reps):
                z = pk.coords(comp.image(k, rep))
                if z is None:
                    raise SSError(f"{comp.name}: image of {srun.space.label(k, rep)} "
                                  f"is not a cycle on E_{self.r}")
                if not z:
                    continue
                dz = 0
                if svals is not None:
                    if not sdet[i]:
                        continue
                    dx = spage.data[t].lift(svals[i])
                    if dx:
                        dz = pt.coords(comp.image(t, dx))
                        if dz is None:
                            raise SSError(f"{comp.name}: image of a boundary is not a cycle on "
                                          f"E_{self.r}")
                rows = [0] * pt.dim
                self._d_of(rows, k, z, lambda j: 1 << j)
                for c in bits(dz):
                    rows[c] ^= 1
                self._emit(sysm, rows, f"{comp.name} at {k}")
                if z & (z - 1) == 0:
                    self.hints.setdefault((k, z.bit_length() - 1), f"image under {comp.name}")

    def _comparison_equations(self, sysm, comp: Comparison):
        if comp.incoming:
            return self._incoming_equations(sysm, comp)
        trun = comp.run
        tpage = trun.pages.get(self.r)
        tdiff = trun.differentials.get(self.r)
        if tpage is None or tdiff is None:
            raise SSError(f"comparison target {trun.name!r} has no page {self.r}")
        data, delta = self.page.data, self.delta
        other = _PageSolver(tpage, [], [], None, None, (), True)
        for k in list(self.blocks):
            t = key_add(k, delta)
            if not (other.settled(k) and other.live(t)):
                continue
            pk, pt, tt = data[k], data[t], tpage.data[t]
            timgs = []
            for rep in pt.reps:
                c = tt.coords(comp.image(t, rep))
                if c is None:
                    raise SSError(f"{comp.name}: image of {self.space.label(t, rep)} "
                                  f"is not a cycle of {trun.name!r} on E_{self.r}")
                timgs.append(c)
            tvals = tdiff.values.get(k)
            tdet = tdiff.determined.get(k)
            for i, rep in enumerate(pk.reps):
                dz = 0
                if other.live(k):
                    z = tpage.data[k].coords(comp.image(k, rep))
                    if z is None:
                        raise SSError(f"{comp.name}: image of {self.space.label(k, rep)} "
                                      f"is not a cycle of {trun.name!r} on E_{self.r}")
                    if tvals is None or not all(tdet[q] for q in bits(z)):
                        continue
                    for q in bits(z):
                        dz ^= tvals[q]
                rows = [0] * tt.dim
                self._d_of(rows, k, 1 << i, lambda m: timgs[m])
                for c in bits(dz):
                    rows[c] ^= 1
                self._emit(sysm, rows, f"{comp.name} at {k}")
                self.hints.setdefault((k, i), f"lift along {comp.name}")

    # solution ------------------------------------------------------------
    def solve(self) -> PageDifferential:
        self.build_blocks()
        sysm = _System()
        self.equations(sysm)
        if sysm.conflict is not None:
            raise InconsistentRulesError(f"page {self.r}: rules contradict each other "
                                         f"(detected at {sysm.conflict})")
        expr = sysm.solve()
        out = PageDifferential(self.r)
        for k, (base, dk, dt) in self.blocks.items():
            vals, det = [], []
            for i in range(dk):
                v, ok = 0, True
                for j in range(dt):
                    e = expr.get(base + i * dt + j, 1 << (base + i * dt + j))
                    if e >> 1:
                        ok = False
                    elif e & 1:
                        v |= 1 << j
                vals.append(v if ok else 0)
                det.append(ok)
                if ok and v:
                    out.reasons[(k, i)] = self.hints.get((k, i), "propagated")
            out.values[k] = vals
            out.determined[k] = det
        return out


def _kernel_tags(vals: Sequence[int], dim: int) -> list[int]:
    """Tags (over the dim source coordinates) spanning the kernel of the map i -> vals[i]."""
    rows = {}
    kern = []
    for i in range(dim):
        v, tag = vals[i], 1 << i
        while v:
            p = v.bit_length() - 1
            if p not in rows:
                rows[p] = (v, tag)
                break
            pv, pt = rows[p]
            v ^= pv
            tag ^= pt
        if not v:
            kern.append(tag)
    return kern


def propagate(page: Page, rules: Sequence[DifferentialRule], multipliers: Sequence = (),
              report: Optional[Window] = None, algebra: Optional[AlgebraContext] = None,
              comparisons: Sequence[Comparison] = ()) -> PageDifferential:
    """Solve for d_r on a page; raises UnderdeterminedError inside the report window."""
    conv = page.convention
    parsed, later = [], []
    for rule in rules:
        if rule.page is None or rule.page == page.r:
            parsed.append(check_rule(rule, page.space, conv))
        elif rule.page > page.r:
            later.append(check_rule(rule, page.space, conv))
    is_module = isinstance(page.space, PresentedModule)
    mult = _multiplier_keys(page.space, parsed, multipliers, algebra)
    solver = _PageSolver(page, parsed, mult, report, algebra, comparisons, is_module)
    solver.later = later
    d = solver.solve()
    for k, det in d.determined.items():
        for i, ok in enumerate(det):
            if not ok and (report is None or report.contains(k)):
                raise UnderdeterminedError(page.r, k, page.space.label(k, page.data[k].reps[i]))
    d.meta = {"multipliers": mult}
    return d


def _multiplier_keys(space, parsed, extra, algebra) -> list:
    keys = set()
    if algebra is not None:
        keys.update(algebra.run.multipliers)
        alg = space.algebra
        for text in extra:
            k, v = alg.parse(text)
            if v:
                keys.add(tuple(k))
        return sorted(keys)
    for i, g in enumerate(space.gens):
        m = [0] * len(space.gens)
        m[i] = 1
        keys.add(space.key(m))
        if g.parity == "laurent":
            m[i] = -1
            keys.add(space.key(m))
    for rr in parsed:
        keys.add(tuple(rr.skey))
    for text in extra:
        k, v = space.parse(text)
        if v:
            keys.add(tuple(k))
    return sorted(keys)


def turn_page(page: Page, d: PageDifferential, check: bool = True) -> tuple[Page, list]:
    """Homology of (E_r, d_r): the next page, plus dimension-accounting rows.

    Raises DSquaredError if d∘d ≠ 0 at any certified key.
    """
    conv = page.convention
    delta = conv.delta(page.r)
    data = page.data
    if check:
        for k, vals in d.values.items():
            t = key_add(k, delta)
            tv = d.values.get(t)
            if tv is None:
                continue
            for i, v in enumerate(vals):
                acc = 0
                for j in bits(v):
                    acc ^= tv[j]
                if acc:
                    raise DSquaredError(f"d_{page.r} d_{page.r}({page.space.label(k, data[k].reps[i])}) ≠ 0")
    new_data = {}
    accounting = []
    undetermined = {k for k, det in d.determined.items() if not all(det)}
    for k, kp in data.items():
        vals = d.values.get(k)
        if vals is None:
            vals = [0] * kp.dim
        kern = _kernel_tags(vals, kp.dim)
        src = key_sub(k, delta)
        incoming = d.values.get(src, [])
        bound = kp.bound.copy()
        for tag in incoming:
            if tag:
                bound.add(kp.lift(tag))
        cycles = [kp.lift(tag) for tag in kern]
        reps = _canonical_reps(bound, cycles)
        new_data[k] = KeyPage(kp.n, bound, reps)
        r_out = kp.dim - len(kern)
        r_in = len(int_rref(incoming))
        accounting.append((page.r, k, kp.dim, r_in, r_out, len(reps)))
        if len(reps) != kp.dim - r_in - r_out:
            raise SSError(f"dimension accounting fails at {k} on page {page.r}")
    cert = set()
    solver = _PageSolver(page, [], [], None, None, (), True)
    for k in page.certified:
        kp = data[k]
        if kp.dim == 0:
            cert.add(k)
            continue
        t, s = key_add(k, delta), key_sub(k, delta)
        out_ok = solver.known_zero(t) or (k in d.values and k not in undetermined)
        if solver.known_zero(s):
            in_ok = True
        else:
            in_ok = s in page.certified and s in d.values and s not in undetermined
            if s in page.certified and s not in d.values and solver.known_zero(k):
                in_ok = True
        if out_ok and in_ok:
            cert.add(k)
    nxt = Page(page.space, conv, page.r + conv.step, page.window, new_data, cert)
    return nxt, accounting


def _pairs_beyond(page: Page, r_min: int) -> list:
    """Certified nonzero keys (k, k + δ_r) for some page r ≥ r_min inside the box."""
    conv = page.convention
    live = [k for k in page.keys() if k in page.certified]
    by_stem: dict = {}
    for k in live:
        by_stem.setdefault(k[0], []).append(k)
    out = []
    for k in live:
        for t in by_stem.get(k[0] - 1, []):
            r = conv.page_of(key_sub(t, k))
            if r is not None and r >= r_min:
                out.append((r, k, t))
    return sorted(out)


def run_pages(name: str, space, conv: Convention, window: Window, rules: Sequence[DifferentialRule],
              last_page: Optional[int] = None, multipliers: Sequence = (),
              report: Optional[Window] = None, algebra: Optional[RunResult] = None,
              comparisons: Sequence[Comparison] = (), max_extra: int = 64) -> RunResult:
    """Compute E_r for r from the first page until no differential can be nonzero."""
    page = e2_page(space, conv, window)
    actx = AlgebraContext(algebra) if algebra is not None else None
    declared = [r.page for r in rules if r.page is not None]
    stop = max(declared + ([last_page] if last_page else []) + [conv.first_page])
    pages, diffs, audit, accounting, no_room = {}, {}, [], [], []
    mult_keys = None
    r = conv.first_page
    while True:
        if r > stop:
            pending = _pairs_beyond(page, r)
            if not pending:
                break
            if r > stop + max_extra:
                raise SSError(f"no collapse detected by page {r}")
            no_room.append((r, len(pending)))
        pages[r] = page
        d = propagate(page, rules, multipliers, report, actx, comparisons)
        mult_keys = d.meta["multipliers"]
        diffs[r] = d
        delta = conv.delta(r)
        for k, vals in sorted(d.values.items()):
            t = key_add(k, delta)
            for i, v in enumerate(vals):
                if v:
                    src = space.label(k, page.data[k].reps[i])
                    tgt = space.label(t, page.data[t].lift(v))
                    audit.append(AuditEntry(r, k, src, tgt, d.reasons.get((k, i), "propagated")))
        page, acc = turn_page(page, d)
        accounting.extend(acc)
        r += conv.step
    if mult_keys is None:
        mult_keys = _multiplier_keys(space, [], multipliers, actx)
    res = RunResult(name, space, conv, pages, diffs, page, audit, mult_keys, report,
                    no_room=no_room, accounting=accounting)
    if report is not None:
        for k in page.data:
            if report.contains(k) and k not in page.certified:
                raise WindowError(f"{name}: key {k} of the report window lost certification; "
                                  f"enlarge the computation box")
    return res
