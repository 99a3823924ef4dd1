"""Expressions, templated tables and monomial maps between presentations."""

from __future__ import annotations

import re
from typing import Mapping, Optional

from ..graded.presentation import PresentationError, PresentedModule, bits

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_']*)|(\^-?\d+)|([()*+]))")


def _tokens(text: str) -> list:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationError(f"cannot parse {text!r} at column {pos + 1}")
        num, name, power, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif name is not None:
            out.append(("name", name))
        elif power is not None:
            out.append(("pow", int(power[1:])))
        else:
            out.append(("op", op))
        pos = m.end()
    return out


class _Value:
    """Homogeneous element: key None means zero of unknown degree."""

    __slots__ = ("key", "vec")

    def __init__(self, key, vec):
        self.key, self.vec = (tuple(key) if key is not None else None), vec


class _AlgebraEval:
    def __init__(self, alg, toks):
        self.alg, self.toks, self.i = alg, toks, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def add(self, a: _Value, b: _Value) -> _Value:
        if not a.vec:
            return b if b.vec or a.key is None else a
        if not b.vec:
            return a
        if a.key != b.key:
            raise PresentationError(f"inhomogeneous sum of degrees {a.key} and {b.key}")
        return _Value(a.key, a.vec ^ b.vec)

    def mul(self, a: _Value, b: _Value) -> _Value:
        if a.key is None or b.key is None:
            return _Value(None, 0)
        k, v = self.alg.multiply(a.key, a.vec, b.key, b.vec)
        return _Value(k, v)

    def power(self, a: _Value, e: int) -> _Value:
        if e < 0:
            raise PresentationError("negative power of a parenthesized expression")
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def one(self) -> _Value:
        k = self.alg.unit_key()
        return _Value(k, self.alg.vector_of(k, self.alg.unit()))

    def expr(self) -> _Value:
        acc = self.term()
        while self.peek() == ("op", "+"):
            self.take()
            acc = self.add(acc, self.term())
        return acc

    def term(self) -> _Value:
        acc = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            acc = self.mul(acc, self.factor())
        return acc

    def factor(self) -> _Value:
        t = self.take()
        if t is None:
            raise PresentationError("unexpected end of expression")
        if t == ("op", "("):
            v = self.expr()
            if self.take() != ("op", ")"):
                raise PresentationError("unbalanced parentheses")
        elif t[0] == "num":
            v = self.one() if t[1] % 2 else _Value(None, 0)
        elif t[0] == "name":
            name = t[1]
            e = 1
            if self.peek() is not None and self.peek()[0] == "pow":
                e = self.take()[1]
            text = name if e == 1 else f"{name}^{e}"
            k, vec = self.alg.parse(text)
            return _Value(k if vec else (k if k is not None else None), vec)
        else:
            raise PresentationError(f"unexpected {t[1]!r}")
        if self.peek() is not None and self.peek()[0] == "pow":
            v = self.power(v, self.take()[1])
        return v


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


def evaluate(space, text: str) -> tuple[Optional[tuple], int]:
    """Evaluate a homogeneous expression with sums, products, parentheses and powers."""
    if isinstance(space, PresentedModule):
        return _evaluate_module(space, text)
    ev = _AlgebraEval(space, _tokens(text))
    v = ev.expr()
    if ev.peek() is not None:
        raise PresentationError(f"trailing input in {text!r}")
    return v.key, v.vec


def _evaluate_module(space: PresentedModule, text: str):
    key, vec = None, 0
    for term in _split_top(text, "+"):
        factors = _split_top(term, "*")
        best = None
        for i in range(len(factors)):
            for j in range(len(factors), i, -1):
                cand = "*".join(factors[i:j])
                if cand in space.gen_index and (best is None or j - i > best[1] - best[0]):
                    best = (i, j, space.gen_index[cand])
        if best is None:
            if "1" not in space.gen_index:
                raise PresentationError(f"no module generator in term {term!r}")
            rest, g = factors, space.gen_index["1"]
        else:
            i, j, g = best
            rest = factors[:i] + factors[j:]
        ka, va = evaluate(space.algebra, "*".join(rest) if rest else "1")
        gk = space.gen_keys[g]
        gv = space.vector_of(gk, (space.algebra.unit(), g))
        if ka is None:
            continue
        k, v = space.act(ka, va, gk, gv)
        if not v:
            if key is None:
                key = k
            continue
        if key is not None and vec and k != key:
            raise PresentationError(f"inhomogeneous expression {text!r}")
        if key is None or not vec:
            key = k
        vec ^= v
    return key, vec


_ARITH = re.compile(r"\(([-+*0-9a-z ]+)\)")
_BARE = re.compile(r"\^([a-z])\b")


def substitute(text: str, values: Mapping[str, int]) -> str:
    """Replace integer arithmetic in the template variables by its value."""

    def calc(expr: str) -> int:
        e = expr
        for name, val in values.items():
            e = re.sub(rf"\b{name}\b", f"({val})", e)
        if not re.fullmatch(r"[-+*0-9() ]+", e):
            raise PresentationError(f"cannot evaluate {expr!r}")
        return int(eval(e, {"__builtins__": {}}))  # only digits and + - * remain

    def group(m):
        inner = m.group(1)
        if not any(re.search(rf"\b{n}\b", inner) for n in values):
            return m.group(0)
        return str(calc(inner))

    prev = None
    while prev != text:
        prev = text
        text = _ARITH.sub(group, text)
    return _BARE.sub(lambda m: f"^{values[m.group(1)]}" if m.group(1) in values else m.group(0), text)


class MonomialMap:
    """Degree-preserving map sending each generator to the same-named generator.

    ``rename`` overrides the target name of source generators; module
    generators are matched by name.  Used for the ``invert t`` and
    ``invert mu`` comparison maps, which are the identity on monomials.
    """

    def __init__(self, source, target, rename: Optional[Mapping[str, str]] = None, name: str = ""):
        self.source, self.target, self.name = source, target, name or "monomial map"
        rename = dict(rename or {})
        src_alg = getattr(source, "algebra", source)
        dst_alg = getattr(target, "algebra", target)
        self._gen = []
        for g in src_alg.gens:
            tname = rename.get(g.name, g.name)
            if tname not in dst_alg.index:
                raise PresentationError(f"{self.name}: no target generator for {g.name}")
            self._gen.append(dst_alg.index[tname])
        self._mod = None
        if isinstance(source, PresentedModule):
            self._mod = [target.gen_index[n] for n in source.gen_names]
        self._cache: dict = {}

    def _mono(self, mono):
        dst_alg = getattr(self.target, "algebra", self.target)
        if self._mod is not None:
            a, j = mono
            return (self._alg_mono(a, dst_alg), self._mod[j])
        return self._alg_mono(mono, dst_alg)

    def _alg_mono(self, a, dst_alg):
        out = [0] * len(dst_alg.gens)
        for i, e in enumerate(a):
            out[self._gen[i]] += e
        return tuple(out)

    def image(self, key, vec: int) -> int:
        key = tuple(key)
        ck = (key, vec)
        hit = self._cache.get(ck)
        if hit is not None:
            return hit
        basis = self.source.basis(key)
        monos = set()
        for i in bits(vec):
            m = self._mono(basis[i])
            if self.target.key(m) != key:
                raise PresentationError(f"{self.name} does not preserve the degree of {basis[i]}")
            if self._mod is not None:
                bad = any(e > 1 and self.target.algebra.gens[g].parity == "exterior"
                          for g, e in enumerate(m[0]))
            else:
                bad = any(e > 1 and self.target.gens[g].parity == "exterior" for g, e in enumerate(m))
            if not bad:
                monos ^= {m}
        out = self.target.reduce_free(key, monos) if monos else 0
        self._cache[ck] = out
        return out

    def __call__(self, key, vec):
        return self.image(key, vec)


def induced_einf_map(mp: MonomialMap, source_run, target_run, key) -> list[int]:
    """Matrix of the map on E_infinity at one key: per source class, target coordinates."""
    key = tuple(key)
    src = source_run.final.data.get(key)
    if src is None or not src.dim:
        return []
    dst = target_run.final.data.get(key)
    out = []
    for rep in src.reps:
        if dst is None:
            out.append(0)
            continue
        c = dst.coords(mp.image(key, rep))
        if c is None:
            raise PresentationError(f"{mp.name}: image of {source_run.space.label(key, rep)} "
                                    f"is not a permanent cycle")
        out.append(c)
    return out
