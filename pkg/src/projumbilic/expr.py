"""Expression trees in z1, z2, conj(z1), conj(z2).

Defining functions of hypersurfaces are written in a tiny DSL, parsed into
immutable trees, differentiated symbolically with respect to the four
formal variables (Wirtinger calculus) and compiled into vectorised numpy
functions with common-subexpression elimination.

    >>> e = parse("abs2(z1) + abs2(z2) - 1")
    >>> evaluate(e, (0.6, 0.8j))
    0j
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, fields
from functools import cached_property, lru_cache

import numpy as np

from .config import TOL
from .errors import BranchError, ParseError


class V(enum.Enum):
    Z1 = 0
    Z2 = 1
    Z1B = 2
    Z2B = 3

    @property
    def conj(self):
        return _CONJ_VAR[self]

    @property
    def source(self):
        return _VAR_SOURCE[self]


_CONJ_VAR = {V.Z1: V.Z1B, V.Z2: V.Z2B, V.Z1B: V.Z1, V.Z2B: V.Z2}
_VAR_SOURCE = {V.Z1: "z1", V.Z2: "z2", V.Z1B: "conj(z1)", V.Z2B: "conj(z2)"}
VARIABLES = (V.Z1, V.Z2, V.Z1B, V.Z2B)


# ---------------------------------------------------------------------------
# nodes

class Node:
    """Base class of all expression nodes.

    Nodes are frozen dataclasses.  Hashes are cached and equality
    short-circuits on identity and hash so that large derivative DAGs with
    shared subtrees stay cheap to compare and to use as dict keys.
    """

    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __truediv__(self, other):
        return div(self, _lift(other))

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            return powi(self, int(k))
        return powr(self, float(k))

    def __str__(self):
        return to_source(self)


def _cached_hash(self):
    try:
        return self.__dict__["_hash"]
    except KeyError:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self._fields))
        object.__setattr__(self, "_hash", h)
        return h


def _node_eq(self, other):
    if self is other:
        return True
    if type(self) is not type(other) or hash(self) != hash(other):
        return False
    return all(getattr(self, n) == getattr(other, n) for n in self._fields)


def _node(cls):
    cls = dataclass(frozen=True, eq=False, repr=True)(cls)
    cls._fields = tuple(f.name for f in fields(cls))
    cls.__hash__ = _cached_hash
    cls.__eq__ = _node_eq
    return cls


@_node
class Const(Node):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@_node
class Var(Node):
    var: V


@_node
class Add(Node):
    left: Node
    right: Node


@_node
class Mul(Node):
    left: Node
    right: Node


@_node
class Neg(Node):
    arg: Node


@_node
class Div(Node):
    num: Node
    den: Node

    def __post_init__(self):
        if _is_const(self.den, 0):
            raise ValueError("division by the literal constant zero")


@_node
class PowI(Node):
    arg: Node
    k: int


@_node
class PowR(Node):
    """``arg ** a`` on the positive real axis only."""
    arg: Node
    a: float

    def __post_init__(self):
        if _is_const(self.arg, 0):
            raise ValueError("powr of the literal constant zero")


@_node
class Log(Node):
    """Real logarithm; the argument must evaluate to a positive real."""
    arg: Node

    def __post_init__(self):
        if _is_const(self.arg, 0):
            raise ValueError("log of the literal constant zero")


@_node
class Exp(Node):
    arg: Node


Z1, Z2, Z1B, Z2B = (Var(v) for v in VARIABLES)
ZERO, ONE = Const(0j), Const(1 + 0j)
I = Const(1j)


def _lift(x):
    if isinstance(x, Node):
        return x
    return Const(complex(x))


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


# ---------------------------------------------------------------------------
# folding constructors (constant folding and identity elements only)

def add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def sub(a, b):
    return add(a, neg(b))


def mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def div(a, b):
    if _is_const(b, 0):
        raise ValueError("division by the literal constant zero")
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value / b.value)
    if _is_const(b, 1):
        return a
    if _is_const(a, 0):
        return ZERO
    return Div(a, b)


def powi(a, k):
    k = int(k)
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Const):
        if a.value == 0 and k < 0:
            raise ValueError("negative power of the literal constant zero")
        return Const(a.value ** k)
    return PowI(a, k)


def _const_posreal(c):
    v = c.value
    if not (v.real > 0 and abs(v.imag) <= TOL.branch * abs(v)):
        raise BranchError(f"argument {v!r} is not a positive real")
    return v.real


def powr(a, alpha):
    alpha = float(alpha)
    if isinstance(a, Const):
        return Const(complex(_const_posreal(a) ** alpha))
    return PowR(a, alpha)


def log(a):
    if isinstance(a, Const):
        return Const(complex(math.log(_const_posreal(a))))
    return Log(a)


def exp(a):
    if isinstance(a, Const):
        return Const(complex(np.exp(a.value)))
    return Exp(a)


# ---------------------------------------------------------------------------
# structural transforms

def _transform(e, leaf, memo):
    """Rebuild ``e`` bottom-up; ``leaf`` maps Var/Const nodes."""
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, (Var, Const)):
        out = leaf(e)
    elif isinstance(e, Add):
        out = add(_transform(e.left, leaf, memo), _transform(e.right, leaf, memo))
    elif isinstance(e, Mul):
        out = mul(_transform(e.left, leaf, memo), _transform(e.right, leaf, memo))
    elif isinstance(e, Neg):
        out = neg(_transform(e.arg, leaf, memo))
    elif isinstance(e, Div):
        out = div(_transform(e.num, leaf, memo), _transform(e.den, leaf, memo))
    elif isinstance(e, PowI):
        out = powi(_transform(e.arg, leaf, memo), e.k)
    elif isinstance(e, PowR):
        out = powr(_transform(e.arg, leaf, memo), e.a)
    elif isinstance(e, Log):
        out = log(_transform(e.arg, leaf, memo))
    elif isinstance(e, Exp):
        out = exp(_transform(e.arg, leaf, memo))
    else:
        raise TypeError(f"not an expression node: {e!r}")
    # keep e alive so id() stays unique for the duration of the walk
    memo[key] = (e, out)
    return out


def _conj_leaf(e):
    if isinstance(e, Var):
        return Var(e.var.conj)
    return Const(e.value.conjugate())


@lru_cache(maxsize=4096)
def conjugate(e):
    """Structural complex conjugate: swap z <-> conj(z), conjugate constants.

    PowR and Log are mapped node for node, which is correct because their
    arguments are required to be positive reals at evaluation time.
    """
    return _transform(e, _conj_leaf, {})


def substitute(e, mapping):
    """Replace variables by expressions; ``mapping`` is keyed by :class:`V`."""
    def leaf(n):
        if isinstance(n, Var) and n.var in mapping:
            return mapping[n.var]
        return n
    return _transform(e, leaf, {})


def _derive(e, v, memo):
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    if isinstance(e, Const):
        out = ZERO
    elif isinstance(e, Var):
        out = ONE if e.var is v else ZERO
    elif isinstance(e, Add):
        out = add(_derive(e.left, v, memo), _derive(e.right, v, memo))
    elif isinstance(e, Mul):
        out = add(mul(_derive(e.left, v, memo), e.right),
                  mul(e.left, _derive(e.right, v, memo)))
    elif isinstance(e, Neg):
        out = neg(_derive(e.arg, v, memo))
    elif isinstance(e, Div):
        dn = _derive(e.num, v, memo)
        dd = _derive(e.den, v, memo)
        if _is_const(dd, 0):
            out = div(dn, e.den)
        else:
            out = div(sub(mul(dn, e.den), mul(e.num, dd)), powi(e.den, 2))
    elif isinstance(e, PowI):
        out = mul(mul(Const(complex(e.k)), powi(e.arg, e.k - 1)),
                  _derive(e.arg, v, memo))
    elif isinstance(e, PowR):
        out = mul(mul(Const(complex(e.a)), powr(e.arg, e.a - 1)),
                  _derive(e.arg, v, memo))
    elif isinstance(e, Log):
        out = div(_derive(e.arg, v, memo), e.arg)
    elif isinstance(e, Exp):
        out = mul(e, _derive(e.arg, v, memo))
    else:
        raise TypeError(f"not an expression node: {e!r}")
    memo[key] = (e, out)
    return out


@lru_cache(maxsize=8192)
def wirtinger_derive(e, v):
    """Partial derivative treating z1, z2, conj(z1), conj(z2) as independent."""
    if isinstance(v, Var):
        v = v.var
    return _derive(e, v, {})


# ---------------------------------------------------------------------------
# pretty printing

def _num(x):
    r = repr(float(x))
    if r in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {x}")
    return r


def _const_source(c):
    re_, im_ = c.real, c.imag
    if im_ == 0:
        return _num(re_) if re_ >= 0 else f"(-{_num(-re_)})"
    im_part = f"{_num(abs(im_))}*i"
    if re_ == 0:
        return f"({im_part})" if im_ > 0 else f"(-{im_part})"
    sign = "+" if im_ > 0 else "-"
    return f"({_num(re_)}{sign}{im_part})"


def to_source(e):
    """Render ``e`` in the DSL; ``parse(to_source(e)) == e`` for parsed trees."""
    if isinstance(e, Const):
        return _const_source(e.value)
    if isinstance(e, Var):
        return e.var.source
    if isinstance(e, Add):
        return f"({to_source(e.left)} + {to_source(e.right)})"
    if isinstance(e, Mul):
        return f"({to_source(e.left)} * {to_source(e.right)})"
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Div):
        return f"({to_source(e.num)} / {to_source(e.den)})"
    if isinstance(e, PowI):
        return f"({to_source(e.arg)})^{e.k}"
    if isinstance(e, PowR):
        return f"powr({to_source(e.arg)}, {_num(e.a)})"
    if isinstance(e, Log):
        return f"log({to_source(e.arg)})"
    if isinstance(e, Exp):
        return f"exp({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def size(e):
    """Number of distinct subtrees (DAG size)."""
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(getattr(n, f) for f in n._fields if isinstance(getattr(n, f), Node))
    return len(seen)


# ---------------------------------------------------------------------------
# parser
#
#   expr   := term (('+'|'-') term)*
#   term   := unary (('*'|'/') unary)*
#   unary  := ('-'|'+') unary | factor
#   factor := atom ('^' '-'? integer)?
#   atom   := number | 'i' | 'z1' | 'z2' | call | '(' expr ')'
#   call   := ident '(' expr (',' expr)* ')'

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_CALLS = {"conj": 1, "abs2": 1, "re": 1, "im": 1, "log": 1, "exp": 1, "powr": 2}


def _tokenize(source):
    pos = 0
    out = []
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(source)))
    return out


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self, text=None, kind=None):
        k, t, pos = self.tok
        if (text is not None and t != text) or (kind is not None and k != kind):
            want = text if text is not None else kind
            got = t if t else "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", pos)
        self.i += 1
        return t

    def at(self, text):
        return self.tok[1] == text and self.tok[0] == "op"

    def parse(self):
        e = self.expr()
        if self.tok[0] != "end":
            raise ParseError(f"unexpected {self.tok[1]!r}", self.tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()
            pos = self.tok[2]
            rhs = self.unary()
            if op == "*":
                e = mul(e, rhs)
            else:
                if _is_const(rhs, 0):
                    raise ParseError("division by zero", pos)
                e = div(e, rhs)
        return e

    def unary(self):
        if self.at("-"):
            self.take()
            return neg(self.unary())
        if self.at("+"):
            self.take()
            return self.unary()
        return self.factor()

    def factor(self):
        e = self.atom()
        if self.at("^"):
            self.take()
            sign = 1
            if self.at("-"):
                self.take()
                sign = -1
            kind, text, pos = self.tok
            if kind != "num" or not text.isdigit():
                raise ParseError("exponent after '^' must be an integer literal", pos)
            self.take()
            k = sign * int(text)
            if k < 0 and _is_const(e, 0):
                raise ParseError("negative power of zero", pos)
            e = powi(e, k)
        return e

    def atom(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.take()
            return Const(complex(float(text)))
        if kind == "op" and text == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            self.take()
            if text == "i":
                return I
            if text == "z1":
                return Z1
            if text == "z2":
                return Z2
            if text in _CALLS:
                return self.call(text, pos)
            raise ParseError(f"unknown identifier {text!r}", pos)
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)

    def call(self, name, pos):
        self.take("(")
        args = [self.expr()]
        while self.at(","):
            self.take()
            args.append(self.expr())
        self.take(")")
        if len(args) != _CALLS[name]:
            raise ParseError(f"{name}() takes {_CALLS[name]} argument(s), got {len(args)}", pos)
        a = args[0]
        try:
            if name == "conj":
                return conjugate(a)
            if name == "abs2":
                return mul(a, conjugate(a))
            if name == "re":
                return div(add(a, conjugate(a)), Const(2 + 0j))
            if name == "im":
                return div(sub(a, conjugate(a)), Const(2j))
            if name == "log":
                return log(a)
            if name == "exp":
                return exp(a)
            if not isinstance(args[1], Const) or args[1].value.imag != 0:
                raise ParseError("powr exponent must be a real constant", pos)
            return powr(a, args[1].value.real)
        except (ValueError, BranchError) as err:
            if isinstance(err, ParseError):
                raise
            raise ParseError(str(err), pos) from None


@lru_cache(maxsize=1024)
def parse(source):
    """Parse DSL source into an expression tree (sugar expanded)."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# compilation

def _posreal(x):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        re_ = x.real
        bad = ~(re_ > 0) | (np.abs(x.imag) > TOL.branch * np.abs(x))
    else:
        re_ = x
        bad = ~(re_ > 0)
    if np.any(bad):
        where = np.flatnonzero(np.atleast_1d(bad))[0]
        val = np.atleast_1d(x)[where]
        raise BranchError(f"log/powr argument {complex(val)!r} is not a positive real")
    return re_


def _log(x):
    return np.log(_posreal(x))


def _powr(x, a):
    return _posreal(x) ** a


def _powi(x, k):
    if k < 0:
        return 1.0 / _powi(x, -k)
    out = None
    base = x
    while k:
        if k & 1:
            out = base if out is None else out * base
        k >>= 1
        if k:
            base = base * base
    return out


_ARGS = {V.Z1: "z1", V.Z2: "z2", V.Z1B: "z1b", V.Z2B: "z2b"}


def compile_exprs(exprs):
    """Compile several trees into one vectorised function with shared CSE.

    The returned callable takes ``(z1, z2, z1b, z2b)`` arrays and returns a
    tuple with one entry per expression (scalars are not broadcast).
    """
    lines = []
    names = {}
    consts = []
    env = {"_log": _log, "_powr": _powr, "_powi": _powi, "_exp": np.exp}

    def visit(n):
        hit = names.get(n)
        if hit is not None:
            return hit
        if isinstance(n, Var):
            return _ARGS[n.var]
        if isinstance(n, Const):
            name = f"k{len(consts)}"
            consts.append(n.value)
            env[name] = n.value
            names[n] = name
            return name
        if isinstance(n, Add):
            code = f"{visit(n.left)} + {visit(n.right)}"
        elif isinstance(n, Mul):
            code = f"{visit(n.left)} * {visit(n.right)}"
        elif isinstance(n, Neg):
            code = f"-{visit(n.arg)}"
        elif isinstance(n, Div):
            code = f"{visit(n.num)} / {visit(n.den)}"
        elif isinstance(n, PowI):
            code = f"_powi({visit(n.arg)}, {n.k})"
        elif isinstance(n, PowR):
            code = f"_powr({visit(n.arg)}, {n.a!r})"
        elif isinstance(n, Log):
            code = f"_log({visit(n.arg)})"
        elif isinstance(n, Exp):
            code = f"_exp({visit(n.arg)})"
        else:
            raise TypeError(f"not an expression node: {n!r}")
        name = f"t{len(lines)}"
        lines.append(f"    {name} = {code}")
        names[n] = name
        return name

    outs = [visit(e) for e in exprs]
    src = "def _compiled(z1, z2, z1b, z2b):\n" + "\n".join(lines)
    src += f"\n    return ({', '.join(outs)},)\n"
    exec(compile(src, "<expr>", "exec"), env)
    fn = env["_compiled"]
    fn.source = src
    return fn


def _prepare(z1, z2):
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    z1, z2 = np.broadcast_arrays(z1, z2)
    return z1, z2, np.conj(z1), np.conj(z2)


def _run(fn, z1, z2):
    z1, z2, z1b, z2b = _prepare(z1, z2)
    with np.errstate(all="ignore"):
        outs = fn(z1, z2, z1b, z2b)
    shape = z1.shape
    return [np.broadcast_to(np.asarray(o, dtype=complex), shape) for o in outs]


# ---------------------------------------------------------------------------
# jets and surfaces

# grad/hess index order
IDX = {V.Z1: 0, V.Z2: 1, V.Z1B: 2, V.Z2B: 3}
_PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]


@dataclass(frozen=True)
class Jet2:
    """Value, Wirtinger gradient and Wirtinger Hessian of a function.

    ``grad[k]`` and ``hess[k, l]`` are indexed in the order
    z1, z2, conj(z1), conj(z2); each entry may be an array over points.
    """
    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __getitem__(self, key):
        """Subscript access: ``jet["1"]``, ``jet["12b"]``, ``jet["1b1b"]``."""
        ix = []
        k = key
        while k:
            idx = int(k[0]) - 1
            k = k[1:]
            if k.startswith("b"):
                idx += 2
                k = k[1:]
            ix.append(idx)
        if len(ix) == 1:
            return self.grad[ix[0]]
        if len(ix) == 2:
            return self.hess[ix[0], ix[1]]
        raise KeyError(key)


class Surface:
    """A defining expression with lazily built, cached derivative tables."""

    def __init__(self, expr):
        self.expr = expr

    def __repr__(self):
        return f"Surface({to_source(self.expr)!r})"

    @cached_property
    def grad_exprs(self):
        return tuple(wirtinger_derive(self.expr, v) for v in VARIABLES)

    @cached_property
    def hess_exprs(self):
        g = self.grad_exprs
        return {(i, j): wirtinger_derive(g[i], VARIABLES[j]) for i, j in _PAIRS}

    @cached_property
    def _value_fn(self):
        return compile_exprs([self.expr])

    @cached_property
    def _grad_fn(self):
        return compile_exprs([self.expr, *self.grad_exprs])

    @cached_property
    def _jet_fn(self):
        h = self.hess_exprs
        return compile_exprs([self.expr, *self.grad_exprs, *(h[p] for p in _PAIRS)])

    def value(self, z1, z2):
        return _run(self._value_fn, z1, z2)[0]

    def gradient(self, z1, z2):
        """Return ``(value, grad)`` with grad stacked on the first axis."""
        outs = _run(self._grad_fn, z1, z2)
        return outs[0], np.stack(outs[1:])

    def jet(self, z1, z2):
        outs = _run(self._jet_fn, z1, z2)
        shape = outs[0].shape
        hess = np.empty((4, 4) + shape, dtype=complex)
        for (i, j), h in zip(_PAIRS, outs[5:]):
            hess[i, j] = h
            hess[j, i] = h
        return Jet2(outs[0], np.stack(outs[1:5]), hess)


@lru_cache(maxsize=512)
def surface(expr):
    """Cached :class:`Surface` for an expression (or DSL source)."""
    if isinstance(expr, str):
        expr = parse(expr)
    return Surface(expr)


def _scalar(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def evaluate(e, p):
    """Evaluate ``e`` at ``p = (z1, z2)``; conj variables get conjugates.

    Raises :class:`BranchError` if a log/powr argument leaves the positive
    real axis.
    """
    return _scalar(surface(e).value(p[0], p[1]))


def jet2(e, p):
    j = surface(e).jet(p[0], p[1])
    if np.ndim(j.value) == 0:
        return Jet2(complex(j.value), j.grad.copy(), j.hess.copy())
    return j


def reality_residual(e, p):
    """Return ``|Im e(p)| / (1 + |e(p)|)``; tiny for real defining expressions."""
    v = np.asarray(surface(e).value(p[0], p[1]))
    return np.abs(v.imag) / (1.0 + np.abs(v))


def is_real_valued(e, points, tol=None):
    tol = TOL.reality if tol is None else tol
    return bool(np.all(reality_residual(e, points) <= tol))
