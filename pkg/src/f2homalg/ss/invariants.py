"""Checks on finished runs, recomputed from the stored pages and differentials."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..gf2 import int_rref
from ..graded.degrees import key_add, key_sub
from ..graded.presentation import PresentedModule, bits
from .engine import RunResult, SSError, Window


class InvariantError(SSError):
    pass


def _d_vec(run: RunResult, r: int, key, vec: int) -> Optional[int]:
    """d_r of a cycle given as an E_2 vector, as an E_2 vector; None outside the stored keys."""
    page, d = run.pages[r], run.differentials[r]
    kp = page.data.get(tuple(key))
    if kp is None:
        return 0 if page.window.contains(key) else None
    tag = kp.coords(vec)
    if tag is None:
        raise InvariantError(f"{run.space.label(key, vec)} is not a cycle on E_{r}")
    if not tag:
        return 0
    vals = d.values.get(tuple(key))
    t = key_add(key, run.convention.delta(r))
    if vals is None:
        return 0 if t not in page.data and page.window.contains(t) else None
    acc = 0
    for i in bits(tag):
        acc ^= vals[i]
    return page.data[t].lift(acc) if acc else 0


def check_d_squared(run: RunResult) -> int:
    """d_r ∘ d_r = 0 on every page; returns the number of composites checked."""
    n = 0
    for r, d in run.differentials.items():
        delta = run.convention.delta(r)
        for k, vals in d.values.items():
            tv = d.values.get(key_add(k, delta))
            if tv is None:
                continue
            for v in vals:
                acc = 0
                for j in bits(v):
                    acc ^= tv[j]
                n += 1
                if acc:
                    raise InvariantError(f"d_{r} ∘ d_{r} ≠ 0 at {k} in {run.name}")
    return n


def check_accounting(run: RunResult) -> int:
    """dim E_{r+1} = dim E_r − rank in − rank out, recomputed from the differentials."""
    n = 0
    pages = sorted(run.pages)
    for idx, r in enumerate(pages):
        page, d = run.pages[r], run.differentials[r]
        nxt = run.pages[pages[idx + 1]] if idx + 1 < len(pages) else run.final
        delta = run.convention.delta(r)
        for k, kp in page.data.items():
            r_out = len(int_rref(d.values.get(k, [])))
            r_in = len(int_rref(d.values.get(key_sub(k, delta), [])))
            if nxt.dim(k) != kp.dim - r_in - r_out:
                raise InvariantError(f"dimension accounting fails at {k} on page {r} of {run.name}")
            n += 1
    return n


def check_monotone(run: RunResult) -> int:
    n = 0
    pages = [run.pages[r] for r in sorted(run.pages)] + [run.final]
    for a, b in zip(pages, pages[1:]):
        for k in a.data:
            if b.dim(k) > a.dim(k):
                raise InvariantError(f"dimension grows at {k} from page {a.r} to {b.r}")
            n += 1
    return n


def check_bidegree_law(run: RunResult) -> int:
    """Every nonzero d_r value is a combination of E_2 monomials of degree source + δ_r."""
    n = 0
    space = run.space
    for r, d in run.differentials.items():
        delta = run.convention.delta(r)
        page = run.pages[r]
        for k, vals in d.values.items():
            t = key_add(k, delta)
            for v in vals:
                if not v:
                    continue
                vec = page.data[t].lift(v)
                basis = space.basis(t)
                for i in bits(vec):
                    got = space.key(basis[i])
                    if tuple(key_sub(got, k)) != tuple(delta):
                        raise InvariantError(f"d_{r} from {k} lands in {got}")
                n += 1
    return n


def _product(space, ka, va, kb, vb, is_module: bool):
    if is_module:
        return space.act(ka, va, kb, vb)
    return space.multiply(ka, va, kb, vb)


def check_product_rule(run: RunResult, algebra: Optional[RunResult] = None,
                       multipliers: Optional[list] = None) -> int:
    """d(a·x) = d(a)·x + a·d(x) on every page, for a in the multiplier keys.

    For a module run, ``algebra`` is the run it is a module over; for an
    algebra run the run itself supplies d(a).  Products leaving the box
    are skipped.  Returns the number of identities checked.
    """
    is_module = isinstance(run.space, PresentedModule)
    arun = algebra if is_module else run
    if is_module and arun is None:
        raise InvariantError(f"{run.name}: module check needs the algebra run")
    mult = multipliers if multipliers is not None else arun.multipliers
    aspace = arun.space
    n = 0
    for r in sorted(run.differentials):
        page = run.pages[r]
        apage = arun.pages.get(r)
        if apage is None:
            continue
        delta = run.convention.delta(r)
        for ka in mult:
            akp = apage.data.get(tuple(ka))
            if akp is None or tuple(ka) not in apage.certified:
                continue
            for a in akp.reps:
                da = _d_vec(arun, r, ka, a)
                for kx, kp in page.data.items():
                    kt = key_add(key_add(ka, kx), delta)
                    kax = key_add(ka, kx)
                    if not all(page.is_certified(k) for k in (kx, kax, kt)):
                        continue
                    if kt not in page.data:
                        continue
                    for x in kp.reps:
                        kax, ax = _product(run.space, ka, a, kx, x, is_module)
                        if not ax or kax not in page.data:
                            continue
                        lhs = _d_vec(run, r, kax, ax)
                        dx = _d_vec(run, r, kx, x)
                        if lhs is None or dx is None or da is None:
                            continue
                        rhs = 0
                        if da:
                            _, v = _product(run.space, key_add(ka, delta), da, kx, x, is_module)
                            rhs ^= v
                        if dx:
                            _, v = _product(run.space, ka, a, key_add(kx, delta), dx, is_module)
                            rhs ^= v
                        tkp = page.data.get(kt)
                        if tkp is None:
                            continue
                        diff = tkp.coords(lhs ^ rhs)
                        if diff is None or diff:
                            raise InvariantError(
                                f"product rule fails on page {r} for "
                                f"{aspace.label(ka, a)} · {run.space.label(kx, x)} in {run.name}")
                        n += 1
    return n


@dataclass
class MultiplicationReport:
    """E_infinity under multiplication by one permanent cycle."""

    element: str
    coker: dict = field(default_factory=dict)      # key -> dim of E∞(k) / u·E∞(k − |u|)
    injective_on: list = field(default_factory=list)
    generators: dict = field(default_factory=dict)  # key -> labels of a complement of the image

    @property
    def rank(self) -> int:
        return sum(self.coker.values())


def _act_final(run: RunResult, ku, vu, k):
    is_module = isinstance(run.space, PresentedModule)
    out = []
    kp = run.final.data.get(tuple(k))
    for rep in (kp.reps if kp else []):
        kt, v = _product(run.space, ku, vu, k, rep, is_module)
        tkp = run.final.data.get(tuple(kt))
        if not v:
            out.append(0)
            continue
        c = tkp.coords(v) if tkp is not None else None
        if c is None:
            raise InvariantError(f"{run.space.label(kt, v)} is not a permanent cycle")
        out.append(c)
    return out


def multiplication_report(run: RunResult, element: str, region: Window) -> MultiplicationReport:
    """Cokernel dims of multiplication by ``element`` on region keys, and injectivity where the
    image lies inside the certified part of E_infinity."""
    aspace = getattr(run.space, "algebra", run.space)
    ku, vu = aspace.parse(element)
    if not vu:
        raise InvariantError(f"{element} is zero")
    rep = MultiplicationReport(element)
    final = run.final
    for k in sorted(set(final.data) | {key_add(k, ku) for k in final.data}):
        if not region.contains(k):
            continue
        if not final.is_certified(k):
            raise InvariantError(f"{k} is not certified on E_infinity of {run.name}")
        dim = final.dim(k)
        src = key_sub(k, ku)
        img = int_rref(c for c in _act_final(run, ku, vu, src) if c) if src in final.data else []
        if len(img) < dim:
            rep.coker[k] = dim - len(img)
            piv = {c.bit_length() - 1 for c in img}
            labels = final.basis(k)
            rep.generators[k] = [labels[i] for i in range(dim) if i not in piv]
    for k in sorted(final.data):
        t = key_add(k, ku)
        if not (region.contains(k) and final.dim(k)):
            continue
        if not (final.is_certified(t) and final.window.contains(t)):
            continue
        cols = _act_final(run, ku, vu, k)
        if len(int_rref(c for c in cols if c)) != final.dim(k):
            raise InvariantError(f"multiplication by {element} is not injective at {k}")
        rep.injective_on.append(k)
    return rep


def check_periodicity(run: RunResult, element: str, region: Window) -> int:
    """dim E∞(k) = dim E∞(k + |element|) whenever both keys lie in the region."""
    aspace = getattr(run.space, "algebra", run.space)
    ku, vu = aspace.parse(element)
    n = 0
    for k in sorted(set(run.final.data)):
        t = key_add(k, ku)
        if region.contains(k) and region.contains(t):
            if run.final.dim(k) != run.final.dim(t):
                raise InvariantError(f"E_infinity is not {element}-periodic at {k}")
            n += 1
    return n


def check_audit(run: RunResult) -> int:
    """Every key whose dimension drops on a page turn is the source or target of a logged d_r."""
    touched = set()
    for a in run.audit:
        if not a.reason:
            raise InvariantError(f"d_{a.page}({a.source}) has no recorded reason")
        touched.add((a.page, tuple(a.source_key)))
        touched.add((a.page, tuple(key_add(a.source_key, run.convention.delta(a.page)))))
    pages = sorted(run.pages)
    n = 0
    for idx, r in enumerate(pages):
        nxt = run.pages[pages[idx + 1]] if idx + 1 < len(pages) else run.final
        for k, kp in run.pages[r].data.items():
            if nxt.dim(k) < kp.dim:
                if (r, tuple(k)) not in touched:
                    raise InvariantError(f"classes at {k} die on page {r} with no audit entry")
                n += 1
    return n


def check_all(run: RunResult, algebra: Optional[RunResult] = None) -> dict:
    """The structural invariants every pipeline run must satisfy, with counts."""
    return {
        "d_squared": check_d_squared(run),
        "accounting": check_accounting(run),
        "monotone": check_monotone(run),
        "bidegree": check_bidegree_law(run),
        "audit": check_audit(run),
        "product_rule": check_product_rule(run, algebra),
    }
