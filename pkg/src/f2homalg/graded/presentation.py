"""Finitely presented multigraded commutative algebras and modules over F₂.

Monomials are exponent tuples aligned with the generator list.  A degree key
is ``(stem, filtration, *e)`` where ``e`` lists the exponents of the tracked
generators (tower or periodicity classes whose exponent is itself a grading).

Normal forms are computed one degree at a time: the relation ideal in degree
``k`` is spanned by ``m·r`` over relations ``r`` and monomials ``m`` of the
complementary degree, and the standard monomials (non-leading columns of its
echelon form) give the basis of the quotient.  With a monomial order this is
exactly the quotient in each degree, so no Gröbner completion is needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..gf2 import Subspace
from .degrees import Bidegree, Key, key_sub

PARITIES = ("polynomial", "exterior", "laurent")


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSymbol:
    name: str
    stem: int
    filtration: int
    parity: str = "polynomial"

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise PresentationError(f"unknown parity {self.parity!r} for {self.name}")

    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(self.stem, self.filtration)


_NAME = r"[A-Za-z][A-Za-z0-9_']*"
_FACTOR = re.compile(rf"^({_NAME})(?:\^(-?\d+))?$")


def split_terms(text: str) -> list[str]:
    text = text.strip()
    if not text:
        raise PresentationError("empty expression")
    return [t.strip() for t in text.split("+")]


def _find_functional(vectors_pos, vectors_zero, ncoords):
    """Integer functional φ with φ(v) ≥ 1 on vectors_pos and φ(v) = 0 on vectors_zero."""
    if not vectors_pos:
        return (0,) * ncoords
    from scipy.optimize import linprog

    a_ub = -np.array(vectors_pos, dtype=float)
    b_ub = -np.ones(len(vectors_pos))
    a_eq = np.array(vectors_zero, dtype=float) if vectors_zero else None
    b_eq = np.zeros(len(vectors_zero)) if vectors_zero else None
    res = linprog(np.zeros(ncoords), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * ncoords, method="highs")
    if not res.success:
        return None
    fr = [Fraction(x).limit_denominator(64) for x in res.x]
    den = 1
    for f in fr:
        den = den * f.denominator // np.gcd(den, f.denominator)
    phi = tuple(int(f * den) for f in fr)
    if any(sum(p * x for p, x in zip(phi, v)) < 1 for v in vectors_pos):
        return None
    if any(sum(p * x for p, x in zip(phi, v)) != 0 for v in vectors_zero):
        return None
    return phi


class _GradedQuotient:
    """Shared per-degree normal-form machinery."""

    keylen: int

    def __init__(self):
        self._cache: dict[Key, "_Degree"] = {}

    # subclasses provide: _free(key) sorted ascending list, _ideal_polys(key), _label(mono)
    def _degree(self, key: Key) -> "_Degree":
        key = tuple(key)
        d = self._cache.get(key)
        if d is None:
            free = self._free(key)
            d = _Degree(free)
            if free:
                for poly in self._ideal_polys(key):
                    d.ideal.add(d.encode(poly))
            d.finish()
            self._cache[key] = d
        return d

    def basis(self, key: Key) -> list:
        """Standard monomials in degree ``key``, ascending in the monomial order."""
        return self._degree(key).std

    def dim(self, key: Key) -> int:
        return len(self._degree(key).std)

    def reduce_free(self, key: Key, monos: Iterable) -> int:
        """Normal form of a sum of (possibly non-standard) monomials, as a basis bitset."""
        d = self._degree(key)
        return d.normal_form(d.encode(monos))

    def label(self, key: Key, vec: int) -> str:
        if not vec:
            return "0"
        b = self.basis(key)
        terms = [self._label(b[i]) for i in range(len(b) - 1, -1, -1) if vec >> i & 1]
        return " + ".join(terms)

    def vector_of(self, key: Key, mono) -> int:
        return self.reduce_free(key, [mono])


class _Degree:
    __slots__ = ("free", "idx", "ideal", "std", "std_of_bit", "bit_of_std")

    def __init__(self, free):
        self.free = free
        self.idx = {m: i for i, m in enumerate(free)}
        self.ideal = Subspace(len(free))
        self.std = []
        self.std_of_bit = {}
        self.bit_of_std = []

    def encode(self, monos) -> int:
        v = 0
        for m in monos:
            i = self.idx.get(m)
            if i is None:
                raise PresentationError(f"monomial {m} not in this degree")
            v ^= 1 << i
        return v

    def finish(self):
        piv = set(self.ideal.pivots())
        for i, m in enumerate(self.free):
            if i not in piv:
                self.std_of_bit[i] = len(self.std)
                self.bit_of_std.append(i)
                self.std.append(m)

    def normal_form(self, v: int) -> int:
        v = self.ideal.reduce(v)
        out = 0
        while v:
            low = v & -v
            i = low.bit_length() - 1
            out |= 1 << self.std_of_bit[i]
            v ^= low
        return out


class PresentedAlgebra(_GradedQuotient):
    """Graded-commutative F₂-algebra: polynomial ⊗ exterior ⊗ Laurent, modulo relations."""

    def __init__(self, generators: Sequence[GeneratorSymbol], relations: Sequence[str] = (),
                 tracked: Sequence[str] = (), params: Optional[Mapping[str, int]] = None,
                 name: str = ""):
        super().__init__()
        self.name = name
        self.gens = list(generators)
        self.params = dict(params or {})
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise PresentationError(f"duplicate generator {dup[0]}")
        self.index = {n: i for i, n in enumerate(names)}
        self.tracked = tuple(tracked)
        for t in self.tracked:
            if t not in self.index:
                raise PresentationError(f"tracked generator {t} is not declared")
        self.keylen = 2 + len(self.tracked)
        self.vec = []
        for g in self.gens:
            v = [g.stem, g.filtration] + [1 if g.name == t else 0 for t in self.tracked]
            self.vec.append(tuple(v))
        tr = {self.index[t] for t in self.tracked}
        self._tracked_idx = [self.index[t] for t in self.tracked]
        self._ext = [i for i, g in enumerate(self.gens) if g.parity == "exterior" and i not in tr]
        self._poly = [i for i, g in enumerate(self.gens) if g.parity == "polynomial" and i not in tr]
        self._laur = [i for i, g in enumerate(self.gens) if g.parity == "laurent" and i not in tr]
        self._phi = {}
        self._match_cache: dict = {}
        self.relation_text = list(relations)
        self.relations: list[tuple[Key, frozenset]] = []
        for r in relations:
            self.relations.append(self._parse_relation(r))

    # grading ----------------------------------------------------------
    @property
    def generator_names(self) -> list[str]:
        return [g.name for g in self.gens]

    def key(self, mono) -> Key:
        k = [0] * self.keylen
        for e, v in zip(mono, self.vec):
            if e:
                for c in range(self.keylen):
                    k[c] += e * v[c]
        return tuple(k)

    def unit(self):
        return (0,) * len(self.gens)

    def unit_key(self) -> Key:
        return (0,) * self.keylen

    def mono_mul(self, a, b):
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            s = x + y
            if s > 1 and self.gens[i].parity == "exterior":
                return None
            out.append(s)
        return tuple(out)

    def is_unit_monomial(self, mono) -> bool:
        return all(e == 0 or self.gens[i].parity == "laurent" for i, e in enumerate(mono))

    # enumeration ------------------------------------------------------
    def _functional(self, coords: tuple):
        if coords not in self._phi:
            pos = [tuple(self.vec[i][c] for c in coords) for i in self._poly]
            zero = [tuple(self.vec[i][c] for c in coords) for i in self._laur]
            self._phi[coords] = _find_functional(pos, zero, len(coords))
        return self._phi[coords]

    def monomials_matching(self, target: Mapping[int, int]) -> list:
        """All monomials whose key agrees with ``target`` on the given coordinates.

        ``target`` maps key coordinate → value; it must fix every tracked
        coordinate.  Raises when the set would be infinite.
        """
        ck = tuple(sorted(target.items()))
        hit = self._match_cache.get(ck)
        if hit is None:
            hit = self._match_cache[ck] = self._matching(target)
        return list(hit)

    def _matching(self, target: Mapping[int, int]) -> list:
        ntr = len(self.tracked)
        texp = []
        for k in range(ntr):
            if 2 + k not in target:
                raise PresentationError("tracked exponents must be fixed for enumeration")
            texp.append(target[2 + k])
        for k, i in enumerate(self._tracked_idx):
            if texp[k] < 0 and self.gens[i].parity != "laurent":
                return []
        coords = tuple(c for c in (0, 1) if c in target)
        phi = self._functional(coords)
        if phi is None:
            raise PresentationError(
                f"degree set is infinite when only coordinates {coords} are fixed; "
                "declare a filtration window")
        resid = [target[c] for c in coords]
        for k, i in enumerate(self._tracked_idx):
            for j, c in enumerate(coords):
                resid[j] -= texp[k] * self.vec[i][c]
        out = []
        base = [0] * len(self.gens)
        for k, i in enumerate(self._tracked_idx):
            base[i] = texp[k]
        cvec = {i: tuple(self.vec[i][c] for c in coords) for i in range(len(self.gens))}
        phiv = {i: sum(p * x for p, x in zip(phi, cvec[i])) for i in range(len(self.gens))}
        # coordinates whose residual can only shrink from each position on
        nonneg = []
        for pos in range(len(self._poly) + 1):
            rest = self._poly[pos:]
            nonneg.append([j for j in range(len(coords))
                           if all(cvec[i][j] >= 0 for i in rest)
                           and all(cvec[i][j] == 0 for i in self._laur)])
        ext = self._ext
        for bits in product((0, 1), repeat=len(ext)):
            r = list(resid)
            mono = list(base)
            for e, i in zip(bits, ext):
                if e:
                    mono[i] = 1
                    r = [a - b for a, b in zip(r, cvec[i])]
            budget = sum(p * x for p, x in zip(phi, r))
            if budget < 0:
                continue
            self._fill_poly(0, budget, r, mono, cvec, phiv, out, nonneg)
        return out

    def _fill_poly(self, pos, budget, r, mono, cvec, phiv, out, nonneg):
        if pos == len(self._poly):
            if budget != 0:
                return
            self._fill_laurent(r, mono, cvec, out)
            return
        i = self._poly[pos]
        step = phiv[i]
        if pos == len(self._poly) - 1:
            if budget % step:
                return
            e = budget // step
            mono[i] = e
            self._fill_laurent([a - e * b for a, b in zip(r, cvec[i])], mono, cvec, out)
            mono[i] = 0
            return
        ci = cvec[i]
        for e in range(budget // step + 1):
            rr = [a - e * b for a, b in zip(r, ci)]
            neg = [j for j in nonneg[pos + 1] if rr[j] < 0]
            if neg:
                if any(ci[j] > 0 for j in neg):
                    break
                continue
            mono[i] = e
            self._fill_poly(pos + 1, budget - e * step, rr, mono, cvec, phiv, out, nonneg)
        mono[i] = 0

    def _fill_laurent(self, r, mono, cvec, out):
        laur = self._laur
        if not laur:
            if all(x == 0 for x in r):
                out.append(tuple(mono))
            return
        if len(laur) > 1:
            raise PresentationError("at most one untracked Laurent generator is supported")
        i = laur[0]
        v = cvec[i]
        e = None
        for a, b in zip(r, v):
            if b == 0:
                if a != 0:
                    return
            else:
                if a % b:
                    return
                q = a // b
                if e is None:
                    e = q
                elif e != q:
                    return
        if e is None:
            raise PresentationError(
                f"exponent of {self.gens[i].name} is not determined by the fixed coordinates")
        m = list(mono)
        m[i] = e
        out.append(tuple(m))

    def monomials_at(self, key: Key) -> list:
        return sorted(self.monomials_matching(dict(enumerate(key))))

    # normal forms -----------------------------------------------------
    def _free(self, key):
        return self.monomials_at(key)

    def _ideal_polys(self, key):
        for rkey, poly in self.relations:
            for m in self.monomials_at(key_sub(key, rkey)):
                acc = set()
                for p in poly:
                    q = self.mono_mul(m, p)
                    if q is not None:
                        acc ^= {q}
                if acc:
                    yield acc

    def _label(self, mono) -> str:
        parts = []
        for g, e in zip(self.gens, mono):
            if e == 1:
                parts.append(g.name)
            elif e:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts) if parts else "1"

    def multiply(self, ka: Key, va: int, kb: Key, vb: int) -> tuple[Key, int]:
        """Product of homogeneous elements given as basis bitsets."""
        k = tuple(x + y for x, y in zip(ka, kb))
        if not va or not vb:
            return k, 0
        ba, bb = self.basis(ka), self.basis(kb)
        acc = set()
        for i in _bits(va):
            for j in _bits(vb):
                m = self.mono_mul(ba[i], bb[j])
                if m is not None:
                    acc ^= {m}
        if not acc:
            return k, 0
        return k, self.reduce_free(k, acc)

    def multiply_monomials(self, a, b) -> tuple[Key, int]:
        return self.multiply(self.key(a), self.vector_of(self.key(a), a),
                             self.key(b), self.vector_of(self.key(b), b))

    # parsing ----------------------------------------------------------
    def parse_monomial(self, term: str):
        """Parse ``coef*g1^e1*g2`` into (coefficient, monomial)."""
        coef = 1
        mono = [0] * len(self.gens)
        for f in (x.strip() for x in term.split("*")):
            if f == "1":
                continue
            if f.isdigit():
                coef *= int(f) % 2
                continue
            if f in self.params:
                coef *= self.params[f] % 2
                continue
            m = _FACTOR.match(f)
            if not m or m.group(1) not in self.index:
                raise PresentationError(f"unknown factor {f!r}")
            i = self.index[m.group(1)]
            e = int(m.group(2)) if m.group(2) is not None else 1
            if e < 0 and self.gens[i].parity != "laurent":
                raise PresentationError(f"negative power of non-invertible {m.group(1)}")
            mono[i] += e
            if self.gens[i].parity == "exterior" and mono[i] > 1:
                coef = 0
        return coef, tuple(mono)

    def parse_polynomial(self, text: str) -> tuple[Optional[Key], set]:
        key = None
        acc: set = set()
        for term in split_terms(text):
            coef, mono = self.parse_monomial(term)
            k = self.key(mono)
            if key is None:
                key = k
            elif k != key:
                raise PresentationError(f"inhomogeneous expression {text!r}")
            if coef:
                acc ^= {mono}
        return key, acc

    def parse(self, text: str) -> tuple[Optional[Key], int]:
        """Homogeneous element → (degree key, basis bitset); zero gives (key or None, 0)."""
        key, acc = self.parse_polynomial(text)
        if not acc:
            return key, 0
        return key, self.reduce_free(key, acc)

    def _parse_relation(self, text: str):
        if "=" in text:
            lhs, rhs = text.split("=", 1)
            kl, pl = self.parse_polynomial(lhs)
            kr, pr = self.parse_polynomial(rhs)
            if kr is not None and kl is not None and kr != kl and pl and pr:
                raise PresentationError(f"inhomogeneous relation {text!r}")
            return (kl if kl is not None else kr), frozenset(pl ^ pr)
        k, p = self.parse_polynomial(text)
        return k, frozenset(p)


class ModuleGenerator(GeneratorSymbol):
    pass


class PresentedModule(_GradedQuotient):
    """Module over a :class:`PresentedAlgebra` on named generators, modulo relations.

    Module generator names may contain ``*`` and ``^`` (names such as
    ``nu^2*w`` label classes that are not literal products); a term is parsed
    by locating the generator name as a contiguous run of its factors.
    """

    def __init__(self, algebra: PresentedAlgebra, generators: Sequence[tuple],
                 relations: Sequence[str] = (), name: str = ""):
        super().__init__()
        self.algebra = algebra
        self.name = name
        self.keylen = algebra.keylen
        self.gen_names: list[str] = []
        self.gen_keys: list[Key] = []
        for g in generators:
            gname, gkey = g[0], tuple(g[1])
            if len(gkey) < self.keylen:
                gkey = gkey + (0,) * (self.keylen - len(gkey))
            if gname in self.gen_names:
                raise PresentationError(f"duplicate generator {gname}")
            self.gen_names.append(gname)
            self.gen_keys.append(gkey)
        self.gen_index = {n: i for i, n in enumerate(self.gen_names)}
        self.relation_text = list(relations)
        self.relations: list[tuple[Key, frozenset]] = []
        for r in relations:
            self.relations.append(self._parse_relation(r))

    def key(self, mono) -> Key:
        a, j = mono
        ka = self.algebra.key(a)
        return tuple(x + y for x, y in zip(ka, self.gen_keys[j]))

    def _free(self, key):
        out = []
        for j, gk in enumerate(self.gen_keys):
            for m in self.algebra.monomials_at(key_sub(key, gk)):
                out.append((m, j))
        out.sort()
        return out

    def _ideal_polys(self, key):
        alg = self.algebra
        for j, gk in enumerate(self.gen_keys):
            sub = key_sub(key, gk)
            for rkey, poly in alg.relations:
                for m in alg.monomials_at(key_sub(sub, rkey)):
                    acc = set()
                    for p in poly:
                        q = alg.mono_mul(m, p)
                        if q is not None:
                            acc ^= {(q, j)}
                    if acc:
                        yield acc
        for rkey, poly in self.relations:
            for m in alg.monomials_at(key_sub(key, rkey)):
                acc = set()
                for (p, j) in poly:
                    q = alg.mono_mul(m, p)
                    if q is not None:
                        acc ^= {(q, j)}
                if acc:
                    yield acc

    def _label(self, mono) -> str:
        a, j = mono
        g = self.gen_names[j]
        al = self.algebra._label(a)
        if al == "1":
            return g
        if g == "1":
            return al
        return f"{al}*{g}"

    def act(self, ka: Key, va: int, km: Key, vm: int) -> tuple[Key, int]:
        """Algebra element (basis bitset in degree ka) acting on a module element."""
        k = tuple(x + y for x, y in zip(ka, km))
        if not va or not vm:
            return k, 0
        ba, bm = self.algebra.basis(ka), self.basis(km)
        acc = set()
        for i in _bits(va):
            for j in _bits(vm):
                a, g = bm[j]
                m = self.algebra.mono_mul(ba[i], a)
                if m is not None:
                    acc ^= {(m, g)}
        if not acc:
            return k, 0
        return k, self.reduce_free(k, acc)

    def parse_term(self, term: str):
        factors = [f.strip() for f in term.split("*")]
        best = None
        for i in range(len(factors)):
            for j in range(len(factors), i, -1):
                cand = "*".join(factors[i:j])
                if cand in self.gen_index and (best is None or j - i > best[1] - best[0]):
                    best = (i, j, self.gen_index[cand])
        if best is None:
            if "1" not in self.gen_index:
                raise PresentationError(f"no module generator in term {term!r}")
            rest, g = factors, self.gen_index["1"]
        else:
            i, j, g = best
            rest = factors[:i] + factors[j:]
        coef, a = self.algebra.parse_monomial("*".join(rest) if rest else "1")
        return coef, (a, g)

    def parse_polynomial(self, text: str):
        key = None
        acc: set = set()
        for term in split_terms(text):
            coef, mono = self.parse_term(term)
            k = self.key(mono)
            if key is None:
                key = k
            elif k != key:
                raise PresentationError(f"inhomogeneous expression {text!r}")
            if coef:
                acc ^= {mono}
        return key, acc

    def parse(self, text: str) -> tuple[Optional[Key], int]:
        key, acc = self.parse_polynomial(text)
        if not acc:
            return key, 0
        return key, self.reduce_free(key, acc)

    def _parse_relation(self, text: str):
        if "=" in text:
            lhs, rhs = text.split("=", 1)
            kl, pl = self.parse_polynomial(lhs)
            rhs = rhs.strip()
            if rhs == "0":
                return kl, frozenset(pl)
            kr, pr = self.parse_polynomial(rhs)
            return kl, frozenset(pl ^ pr)
        k, p = self.parse_polynomial(text)
        return k, frozenset(p)

    def monomials_matching(self, target: Mapping[int, int]) -> list:
        out = []
        for j, gk in enumerate(self.gen_keys):
            sub = {c: v - gk[c] for c, v in target.items()}
            out.extend((m, j) for m in self.algebra.monomials_matching(sub))
        return out


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def monomial_basis(space, stems: tuple[int, int], filtrations: Optional[tuple[int, int]] = None,
                   tracked: Optional[Sequence[tuple[int, int]]] = None) -> dict:
    """Standard monomial basis per degree key inside a finite window.

    ``stems`` and ``filtrations`` are inclusive ranges; ``tracked`` gives one
    inclusive range per tracked generator.  Keys with an empty basis are
    omitted.
    """
    tr = list(tracked or [])
    ntr = space.keylen - 2
    if len(tr) != ntr:
        raise PresentationError(f"window needs {ntr} tracked ranges, got {len(tr)}")
    keys = set()
    for texp in product(*[range(a, b + 1) for a, b in tr]):
        for n in range(stems[0], stems[1] + 1):
            target = {0: n}
            for k, e in enumerate(texp):
                target[2 + k] = e
            if filtrations is None:
                for mono in space.monomials_matching(target):
                    keys.add(space.key(mono))
            else:
                for s in range(filtrations[0], filtrations[1] + 1):
                    t2 = dict(target)
                    t2[1] = s
                    for mono in space.monomials_matching(t2):
                        keys.add(space.key(mono))
    out = {}
    for k in sorted(keys):
        b = space.basis(k)
        if b:
            out[k] = b
    return out


bits = _bits
