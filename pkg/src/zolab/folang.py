"""First-order formulas over the signature {N (s-ary), =}.

AST, concrete-syntax parser, printer, quantifier depth, Tarskian evaluator,
and builders for the distance predicates and the two spectrum-witness
properties used elsewhere in the package.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .hypercore import Hypergraph


class Formula:
    """Base class for AST nodes; instances are immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


def neq(x: str, y: str) -> Formula:
    return Not(Eq(x, y))


def and_all(parts: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; structural duplicates are dropped."""
    seen: list[Formula] = []
    for p in parts:
        if p not in seen:
            seen.append(p)
    if not seen:
        raise ValueError("empty conjunction")
    out = seen[0]
    for p in seen[1:]:
        out = And(out, p)
    return out


def or_all(parts: Iterable[Formula]) -> Formula:
    seen: list[Formula] = []
    for p in parts:
        if p not in seen:
            seen.append(p)
    if not seen:
        raise ValueError("empty disjunction")
    out = seen[0]
    for p in seen[1:]:
        out = Or(out, p)
    return out


def exists_all(variables: Iterable[str], body: Formula) -> Formula:
    out = body
    for v in reversed(list(variables)):
        out = Exists(v, out)
    return out


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(f.args)
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Not):
        return free_variables(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left) | free_variables(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_variables(f.body) - {f.var}
    raise TypeError(f"not a formula node: {f!r}")


def quantifier_depth(f: Formula) -> int:
    """Maximum number of nested quantifiers."""
    if isinstance(f, (Atom, Eq)):
        return 0
    if isinstance(f, Not):
        return quantifier_depth(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(quantifier_depth(f.left), quantifier_depth(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_depth(f.body)
    raise TypeError(f"not a formula node: {f!r}")


def atom_arity(f: Formula) -> int | None:
    """Common arity of all N atoms, or None when the formula has no atom."""
    arities = {len(n.args) for n in _walk(f) if isinstance(n, Atom)}
    if not arities:
        return None
    if len(arities) > 1:
        raise ValueError(f"inconsistent N arities: {sorted(arities)}")
    return arities.pop()


def _walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from _walk(f.body)
    elif isinstance(f, (And, Or, Implies)):
        yield from _walk(f.left)
        yield from _walk(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from _walk(f.body)


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

_LVL_FORMULA, _LVL_IMPL, _LVL_OR, _LVL_AND, _LVL_UNARY = range(5)


def to_text(f: Formula) -> str:
    """Concrete syntax; parse(to_text(f)) reproduces f exactly."""
    return _print(f, _LVL_FORMULA)


def _print(f: Formula, level: int) -> str:
    if isinstance(f, Atom):
        return f"N({','.join(f.args)})"
    if isinstance(f, Eq):
        s = f"{f.left} = {f.right}"
        return f"({s})" if level > _LVL_UNARY else s
    if isinstance(f, Not):
        inner = _print(f.body, _LVL_UNARY + 1 if isinstance(f.body, Eq) else _LVL_UNARY)
        return f"!{inner}"
    if isinstance(f, And):
        s = f"{_print(f.left, _LVL_AND)} & {_print(f.right, _LVL_UNARY)}"
        return f"({s})" if level > _LVL_AND else s
    if isinstance(f, Or):
        s = f"{_print(f.left, _LVL_OR)} | {_print(f.right, _LVL_AND)}"
        return f"({s})" if level > _LVL_OR else s
    if isinstance(f, Implies):
        s = f"{_print(f.left, _LVL_OR)} -> {_print(f.right, _LVL_IMPL)}"
        return f"({s})" if level > _LVL_IMPL else s
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {f.var} {_print(f.body, _LVL_FORMULA)}"
        return f"({s})" if level > _LVL_FORMULA else s
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(r"\s*(->|[()=,&|!]|[A-Za-z_][A-Za-z0-9_]*)")
_KEYWORDS = {"exists", "forall"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or not m.group(1):
            rest = text[pos:].strip()
            if not rest:
                break
            raise FormulaSyntaxError(f"unexpected character {rest[0]!r}", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self, expected: str | None = None) -> str:
        if self.i >= len(self.tokens):
            raise FormulaSyntaxError("unexpected end of input", len(self.text))
        tok, p = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}", p)
        self.i += 1
        return tok

    def variable(self) -> str:
        tok = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) or tok in _KEYWORDS or tok == "N":
            raise FormulaSyntaxError(f"expected a variable, found {tok!r}",
                                     self.tokens[self.i - 1][1])
        return tok

    def formula(self) -> Formula:
        if self.peek() in _KEYWORDS:
            kw = self.take()
            var = self.variable()
            body = self.formula()
            return Exists(var, body) if kw == "exists" else Forall(var, body)
        return self.implication()

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek() == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek() == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok == "N":
            self.take()
            self.take("(")
            args = [self.variable()]
            while self.peek() == ",":
                self.take()
                args.append(self.variable())
            self.take(")")
            return Atom(tuple(args))
        left = self.variable()
        self.take("=")
        right = self.variable()
        return Eq(left, right)


def parse(text: str) -> Formula:
    """Parse concrete syntax into an AST; all N atoms must agree in arity."""
    p = _Parser(text)
    f = p.formula()
    if p.i < len(p.tokens):
        raise FormulaSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    try:
        atom_arity(f)
    except ValueError as exc:
        raise FormulaSyntaxError(str(exc), 0) from None
    return f


# ---------------------------------------------------------------------------
# evaluator
# ---------------------------------------------------------------------------

class _CNode:
    """Compiled formula node; `free` is the sorted tuple of free variables."""

    __slots__ = ("kind", "a", "b", "var", "args", "free", "memo")

    def __init__(self, kind, a=None, b=None, var=None, args=None, free=()):
        self.kind = kind
        self.a = a
        self.b = b
        self.var = var
        self.args = args
        self.free = free
        self.memo: dict | None = None


def _compile(f: Formula) -> _CNode:
    if isinstance(f, Atom):
        return _CNode("atom", args=f.args, free=tuple(sorted(set(f.args))))
    if isinstance(f, Eq):
        return _CNode("eq", a=f.left, b=f.right,
                      free=tuple(sorted({f.left, f.right})))
    if isinstance(f, Not):
        body = _compile(f.body)
        return _CNode("not", a=body, free=body.free)
    if isinstance(f, (And, Or, Implies)):
        kind = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        left, right = _compile(f.left), _compile(f.right)
        return _CNode(kind, a=left, b=right,
                      free=tuple(sorted(set(left.free) | set(right.free))))
    if isinstance(f, (Exists, Forall)):
        body = _compile(f.body)
        kind = "exists" if isinstance(f, Exists) else "forall"
        return _CNode(kind, a=body, var=f.var,
                      free=tuple(v for v in body.free if v != f.var))
    raise TypeError(f"not a formula node: {f!r}")


def evaluate(f: Formula, g: Hypergraph, assignment: Mapping[int, int] | None = None,
             *, memo: bool = True) -> bool:
    """Standard Tarskian semantics; quantifiers range over all vertices of g.

    The assignment must cover every free variable.  Memoization is keyed on
    (subformula, restriction of the environment to its free variables) and is
    confined to this call.
    """
    arity = atom_arity(f)
    if arity is not None and arity != g.s:
        raise ValueError(f"N arity {arity} does not match host arity {g.s}")
    env = dict(assignment or {})
    missing = free_variables(f) - set(env)
    if missing:
        raise ValueError(f"unbound free variables: {sorted(missing)}")
    for var, val in env.items():
        if val not in g.vertices:
            raise ValueError(f"assignment sends {var} to unknown vertex {val}")

    verts = tuple(sorted(g.vertices))
    edges = g.edges
    s = g.s
    root = _compile(f)

    def ev(node: _CNode, env: dict) -> bool:
        kind = node.kind
        if kind == "atom":
            vals = [env[a] for a in node.args]
            return len(set(vals)) == s and frozenset(vals) in edges
        if kind == "eq":
            return env[node.a] == env[node.b]
        if kind == "not":
            return not ev(node.a, env)
        if kind == "and":
            return ev(node.a, env) and ev(node.b, env)
        if kind == "or":
            return ev(node.a, env) or ev(node.b, env)
        if kind == "implies":
            return (not ev(node.a, env)) or ev(node.b, env)
        # quantifiers
        if memo:
            key = tuple(env[v] for v in node.free)
            if node.memo is None:
                node.memo = {}
            hit = node.memo.get(key)
            if hit is not None:
                return hit
        var, body = node.var, node.a
        saved = env.get(var, _MISSING)
        if kind == "exists":
            result = False
            for w in verts:
                env[var] = w
                if ev(body, env):
                    result = True
                    break
        else:
            result = True
            for w in verts:
                env[var] = w
                if not ev(body, env):
                    result = False
                    break
        if saved is _MISSING:
            env.pop(var, None)  # vertex loop may be empty
        else:
            env[var] = saved
        if memo:
            node.memo[key] = result
        return result

    return ev(root, env)


_MISSING = object()


# ---------------------------------------------------------------------------
# random formulas (seeded; used by game-agreement and oracle tests)
# ---------------------------------------------------------------------------

def random_formula(rng, s: int, max_depth: int, *, closed: bool = True,
                   free_vars: tuple[str, ...] = ()) -> Formula:
    """Random AST with quantifier depth <= max_depth over the s-ary signature.

    Closed formulas start with a quantifier (the signature has no nullary
    atoms, so max_depth must be >= 1 when closed and no free_vars are given).
    """
    if closed and not free_vars and max_depth < 1:
        raise ValueError("closed formulas need quantifier depth >= 1")
    counter = itertools.count(1)

    def go(depth: int, scope: tuple[str, ...]) -> Formula:
        choices = []
        if scope:
            choices += ["atom", "atom", "eq", "not", "bin"]
        if depth > 0:
            choices += ["quant"] * (4 if not scope else 2)
        kind = rng.choice(choices)
        if kind == "atom":
            return Atom(tuple(rng.choice(scope) for _ in range(s)))
        if kind == "eq":
            return Eq(rng.choice(scope), rng.choice(scope))
        if kind == "not":
            return Not(go(depth, scope))
        if kind == "bin":
            op = rng.choice((And, Or, Implies))
            return op(go(depth, scope), go(depth, scope))
        var = f"q{next(counter)}"
        body = go(depth - 1, scope + (var,))
        return (Exists if rng.random() < 0.5 else Forall)(var, body)

    return go(max_depth, tuple(free_vars))


# ---------------------------------------------------------------------------
# distance-predicate builders
# ---------------------------------------------------------------------------

class _Names:
    """Fresh bound-variable names, deterministic per builder call."""

    def __init__(self, prefix: str = "q"):
        self.prefix = prefix
        self.counter = itertools.count(1)

    def fresh(self) -> str:
        return f"{self.prefix}{next(self.counter)}"

    def batch(self, k: int) -> list[str]:
        return [self.fresh() for _ in range(k)]


def _dist_at_most(i: int, s: int, x: str, y: str, names: _Names) -> Formula:
    """Distance <= i; i = 0 degenerates to equality."""
    if i == 0:
        return Eq(x, y)
    if i == 1:
        extra = names.batch(s - 2)
        return Or(Eq(x, y), exists_all(extra, Atom((x, *extra, y))))
    mid = names.fresh()
    return Exists(mid, And(_dist_at_most(i // 2, s, x, mid, names),
                           _dist_at_most((i + 1) // 2, s, mid, y, names)))


def _dist_exact(i: int, s: int, x: str, y: str, names: _Names) -> Formula:
    if i == 0:
        return Eq(x, y)
    return And(_dist_at_most(i, s, x, y, names),
               Not(_dist_at_most(i - 1, s, x, y, names)))


def build_dist_at_most(i: int, s: int, x: str = "x1", y: str = "x2") -> Formula:
    """Two-free-variable formula: distance between x and y is at most i."""
    if i < 1:
        raise ValueError("distance bound must be >= 1")
    if s < 3:
        raise ValueError("arity must be >= 3")
    return _dist_at_most(i, s, x, y, _Names())


def build_dist_exact(i: int, s: int, x: str = "x1", y: str = "x2") -> Formula:
    """Two-free-variable formula: distance between x and y is exactly i."""
    if i < 1:
        raise ValueError("distance bound must be >= 1")
    if s < 3:
        raise ValueError("arity must be >= 3")
    return _dist_exact(i, s, x, y, _Names())


def build_dist_pair(i: int, j: int, s: int, x: str = "x1", y: str = "x2",
                    z: str = "x3") -> Formula:
    """Three-free-variable formula: distance(x, z) = i and distance(z, y) = j."""
    if i < 1 or j < 1:
        raise ValueError("distance bounds must be >= 1")
    if s < 3:
        raise ValueError("arity must be >= 3")
    names = _Names()
    return _dist_pair(i, j, s, x, y, z, names)


def _dist_pair(i: int, j: int, s: int, x: str, y: str, z: str, names: _Names) -> Formula:
    return And(_dist_exact(i, s, x, z, names), _dist_exact(j, s, z, y, names))


# ---------------------------------------------------------------------------
# the two composite properties used to probe the spectrum endpoints
# ---------------------------------------------------------------------------

def build_theorem6_L(s: int, k: int) -> Formula:
    """Closed formula of quantifier depth <= k asserting a double path bundle.

    Two vertices a, b at distance exactly 2^l (l = k - s - 4) whose set of
    bundle midpoints is clean of branching (first conjunct) and cannot be
    covered, minus one exception, by two remote hub vertices (second
    conjunct).
    """
    if s < 3:
        raise ValueError("arity must be >= 3")
    l = k - s - 4
    if l < 1:
        raise ValueError(f"need k >= s + 5, got s={s}, k={k}")
    half = 1 << (l - 1)
    full = 1 << l
    names = _Names()
    a, b, u1, u2 = "a", "b", "u1", "u2"

    def midpoint(u: str) -> Formula:
        # u is a midpoint: distance exactly half from both a and b
        return _dist_pair(half, half, s, a, b, u, names)

    def r_one(base: str) -> Formula | None:
        # two paths of length half from u1, u2 meeting on the base side
        terms = []
        x = names.fresh()
        for i in range(1, half):
            terms.append(And(_dist_pair(i, half - i, s, u1, base, x, names),
                             _dist_exact(i, s, u2, x, names)))
        if not terms:
            return None  # empty disjunction (l = 1): identically false, dropped
        return Exists(x, or_all(terms))

    def r_two(base: str) -> Formula:
        # radius half - 1 degenerates to equality at l = 1
        x1, x2 = names.fresh(), names.fresh()
        pads = names.batch(s - 3)
        edge = exists_all(pads, Atom((base, x1, x2, *pads)))
        return exists_all(
            [x1, x2],
            and_all([_dist_exact(half - 1, s, u1, x1, names),
                     _dist_exact(half - 1, s, u2, x2, names),
                     edge]))

    branch_parts = [p for p in (r_one(a), r_two(a), r_one(b), r_two(b)) if p is not None]
    q1 = And(
        _dist_exact(full, s, a, b, names),
        Not(Exists(u1, Exists(u2, and_all(
            [neq(u1, u2), midpoint(u1), midpoint(u2), or_all(branch_parts)])))))

    c, z1, z2, u = "c", "z1", "z2", "u"
    covered = Forall(u, Implies(And(midpoint(u), neq(u, c)),
                                Or(_dist_exact(full, s, u, z1, names),
                                   _dist_exact(full, s, u, z2, names))))
    q2 = Not(Exists(c, Exists(z1, Exists(z2, and_all(
        [neq(z1, z2),
         Not(_dist_at_most(full, s, a, z1, names)),
         Not(_dist_at_most(full, s, b, z1, names)),
         Not(_dist_at_most(full, s, a, z2, names)),
         Not(_dist_at_most(full, s, b, z2, names)),
         covered])))))

    return Exists(a, Exists(b, And(q1, q2)))


def build_theorem8_L(s: int, k: int, a1: int | None = None,
                     a2: int | None = None) -> Formula:
    """Closed formula of quantifier depth <= k asserting a two-circuit anchor.

    For k >= s + 2 the split (a1, a2) with a1 + a2 = a + 3 and
    a1, a2 in {1..2^(k-s)} is required; for k = s + 1 the parameters are fixed
    and a1/a2 must be omitted.
    """
    if s < 3:
        raise ValueError("arity must be >= 3")
    if k < s + 1:
        raise ValueError(f"need k >= s + 1, got s={s}, k={k}")
    if k == s + 1:
        if a1 is not None or a2 is not None:
            raise ValueError("a1/a2 are fixed for k = s + 1; omit them")
        return _theorem8_base(s)
    if a1 is None or a2 is None:
        raise ValueError("a1 and a2 are required for k >= s + 2")
    lim = 1 << (k - s)
    if not (1 <= a1 <= lim and 1 <= a2 <= lim):
        raise ValueError(f"a1, a2 must lie in 1..{lim}")
    a = a1 + a2 - 3
    if not (1 <= a <= (1 << (k - s + 1)) - 3):
        raise ValueError(f"a = a1 + a2 - 3 = {a} outside 1..{(1 << (k - s + 1)) - 3}")
    return _theorem8_chain(s, k, a1, a2)


def _theorem8_base(s: int) -> Formula:
    names = _Names()
    x1, x2, x3 = "x1", "x2", "x3"

    def t_pred(args: tuple[str, ...]) -> Formula:
        # T_i: the i given vertices extend to an edge
        pads = names.batch(s - len(args))
        atom = Atom((*args, *pads))
        return exists_all(pads, atom) if pads else atom

    pads1 = names.batch(s - 3)
    first = exists_all(pads1, Atom((x1, x2, x3, *pads1))) if pads1 else Atom((x1, x2, x3))
    ys = names.batch(s - 2)
    second = exists_all(ys, and_all([Atom((x1, x2, *ys))] + [neq(y, x3) for y in ys]))
    q1 = Exists(x2, Exists(x3, And(first, second)))

    q2 = Exists(x2, Exists(x3, and_all([
        t_pred((x1, x2)), t_pred((x1, x3)), t_pred((x2, x3)),
        Not(t_pred((x1, x2, x3)))])))
    return Exists(x1, And(q1, q2))


def _theorem8_chain(s: int, k: int, a1: int, a2: int) -> Formula:
    names = _Names()
    x1 = "x1"

    def r_one(x: str, y1: str, y2: str) -> Formula:
        ys = names.batch(s - 2)
        return exists_all(ys, and_all([Atom((y1, y2, *ys))] + [neq(y, x) for y in ys]))

    def r_two(y1: str, y2: str, y3: str) -> Formula:
        if s == 3:
            return Not(Atom((y1, y2, y3)))
        ys = names.batch(s - 3)
        return Not(exists_all(ys, Atom((y1, y2, y3, *ys))))

    def c_one(w: str) -> Formula:
        p, q = names.fresh(), names.fresh()
        pads1 = names.batch(s - 3)
        atom1 = Atom((w, p, q, *pads1))
        both = and_all([atom1] + [neq(y, x1) for y in pads1])
        edge1 = exists_all(pads1, both) if pads1 else atom1
        ys = names.batch(s - 2)
        edge2 = exists_all(ys, and_all(
            [Atom((w, p, *ys))] + [f for y in ys for f in (neq(y, x1), neq(y, q))]))
        return and_all([neq(w, x1),
                        Exists(p, Exists(q, and_all(
                            [neq(p, x1), neq(q, x1), edge1, edge2])))])

    def c_two(w: str) -> Formula:
        p, q = names.fresh(), names.fresh()
        return and_all([neq(w, x1),
                        Exists(p, Exists(q, and_all(
                            [neq(p, x1), neq(q, x1),
                             r_one(x1, w, p), r_one(x1, w, q), r_one(x1, p, q),
                             r_two(w, p, q)])))])

    def leg(first_dist: int, tail: "callable") -> Formula:
        # chain: x2 at distance first_dist from x1, then hops 2^(k-s-1) .. 2^2
        dists = [first_dist] + [1 << j for j in range(k - s - 1, 1, -1)]
        hops = [x1] + names.batch(len(dists))

        def nest(i: int) -> Formula:
            link = _dist_exact(dists[i], s, hops[i], hops[i + 1], names)
            if i + 1 == len(dists):
                return Exists(hops[i + 1], And(link, tail(hops[i + 1])))
            return Exists(hops[i + 1], And(link, nest(i + 1)))

        return nest(0)

    return Exists(x1, And(leg(a1, c_one), leg(a2, c_two)))
