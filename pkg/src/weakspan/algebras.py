"""Attribute algebras: term algebras, unbounded naturals with addition, finite enumerations.

Carrier values are Python objects: ``int`` for the naturals, ``str`` for
enumerated values, and :class:`Var`/:class:`Lit`/:class:`OpApp` trees for
terms.  Label sets are finite sets of carrier values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class OpApp:
    op: str
    args: tuple


Term = Union[Var, Lit, OpApp]
Value = Union[int, str, Var, Lit, OpApp]


def term_variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, OpApp):
        out: set[str] = set()
        for a in t.args:
            out |= term_variables(a)
        return out
    return set()


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return str(t.value)
    if isinstance(t, OpApp) and t.op == "+" and len(t.args) == 2:
        left, right = t.args
        rs = render_term(right)
        if isinstance(right, OpApp):
            rs = f"({rs})"
        return f"{render_term(left)}+{rs}"
    if isinstance(t, OpApp):
        return f"{t.op}({', '.join(render_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def render_value(v: Value) -> str:
    if isinstance(v, (Var, Lit, OpApp)):
        return render_term(v)
    return str(v)


def value_sort_key(v: Value):
    """A total order over mixed carrier values, for deterministic output."""
    if isinstance(v, bool):
        raise TypeError("booleans are not carrier values")
    if isinstance(v, int):
        return (0, v, "")
    if isinstance(v, str):
        return (1, 0, v)
    return (2, 0, render_term(v))


class TermSyntaxError(ValueError):
    pass


def parse_term(text: str) -> Term:
    """Parse infix ``+`` expressions with parentheses, lowercase identifiers, decimal literals."""
    tokens = _tokenize(text)
    term, pos = _parse_sum(tokens, 0)
    if pos != len(tokens):
        raise TermSyntaxError(f"unexpected {tokens[pos]!r} in term {text!r}")
    return term


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "+()":
            tokens.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(text[i:j])
            i = j
        elif c.isalpha() and c.islower():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise TermSyntaxError(f"bad character {c!r} in term {text!r}")
    if not tokens:
        raise TermSyntaxError("empty term")
    return tokens


def _parse_sum(tokens: list[str], pos: int) -> tuple[Term, int]:
    left, pos = _parse_atom(tokens, pos)
    while pos < len(tokens) and tokens[pos] == "+":
        right, pos = _parse_atom(tokens, pos + 1)
        left = OpApp("+", (left, right))
    return left, pos


def _parse_atom(tokens: list[str], pos: int) -> tuple[Term, int]:
    if pos >= len(tokens):
        raise TermSyntaxError("term ends unexpectedly")
    tok = tokens[pos]
    if tok == "(":
        inner, pos = _parse_sum(tokens, pos + 1)
        if pos >= len(tokens) or tokens[pos] != ")":
            raise TermSyntaxError("missing closing parenthesis")
        return inner, pos + 1
    if tok.isdigit():
        return Lit(int(tok)), pos + 1
    if tok[0].isalpha():
        return Var(tok), pos + 1
    raise TermSyntaxError(f"unexpected token {tok!r}")


class OpSignature:
    """Finite set of operation symbols with arities."""

    def __init__(self, operations: Mapping[str, int]):
        self.operations = dict(operations)
        for sym, arity in self.operations.items():
            if arity < 0:
                raise ValueError(f"operation {sym!r} has negative arity")

    def __eq__(self, other) -> bool:
        return isinstance(other, OpSignature) and self.operations == other.operations

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"OpSignature({self.operations})"


PLUS_SIGNATURE = OpSignature({"+": 2})


class Algebra:
    """Base class; the three kinds below cover every use in this package."""

    kind = "abstract"
    variables: frozenset = frozenset()

    def contains(self, value: Value) -> bool:
        raise NotImplementedError

    def interprets(self, op: str) -> bool:
        return False


class TermAlg(Algebra):
    """Terms over an operation signature and a finite variable set."""

    kind = "term"

    def __init__(self, signature: OpSignature, variables: Iterable[str]):
        self.signature = signature
        self.variables = frozenset(variables)

    def contains(self, value: Value) -> bool:
        if isinstance(value, Var):
            return value.name in self.variables
        if isinstance(value, Lit):
            return value.value >= 0
        if isinstance(value, OpApp):
            arity = self.signature.operations.get(value.op)
            return arity == len(value.args) and all(self.contains(a) for a in value.args)
        return False

    def interprets(self, op: str) -> bool:
        return op in self.signature.operations

    def __eq__(self, other) -> bool:
        return (isinstance(other, TermAlg)
                and self.signature == other.signature
                and self.variables == other.variables)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"TermAlg({self.signature}, vars={sorted(self.variables)})"


class NatPlus(Algebra):
    """Unbounded natural numbers with '+' as addition."""

    kind = "nat"

    def contains(self, value: Value) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and value >= 0

    def interprets(self, op: str) -> bool:
        return op == "+"

    def __eq__(self, other) -> bool:
        return isinstance(other, NatPlus)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return "NatPlus()"


class FiniteEnum(Algebra):
    """A finite enumerated carrier with no operations."""

    kind = "enum"

    def __init__(self, values: Iterable[str]):
        self.values = frozenset(values)

    def contains(self, value: Value) -> bool:
        return value in self.values

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteEnum) and self.values == other.values

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        return f"FiniteEnum({sorted(self.values)})"


class LabelSet(frozenset):
    """A finite set of carrier values attached to one graph element."""

    __slots__ = ()

    def render(self) -> str:
        return "{" + ", ".join(render_value(v) for v in sorted(self, key=value_sort_key)) + "}"

    def __repr__(self) -> str:
        return f"LabelSet({self.render()})"


EMPTY_LABELS = LabelSet()


class EvaluationError(ValueError):
    pass


class AlgebraMorphism:
    """A map between algebras given by a variable assignment (or an identity).

    An assignment that sends every variable to itself is normalized to the
    identity.  Sources other than term algebras admit only the identity.
    """

    def __init__(self, source: Algebra, target: Algebra,
                 assignment: Optional[Mapping[str, Value]] = None):
        self.source = source
        self.target = target
        assignment = dict(assignment or {})
        if isinstance(source, TermAlg):
            if source == target and all(assignment.get(v, Var(v)) == Var(v) for v in source.variables):
                assignment = {}
            else:
                missing = source.variables - set(assignment)
                if missing:
                    raise ValueError(f"assignment misses variables {sorted(missing)}")
                extra = set(assignment) - source.variables
                if extra:
                    raise ValueError(f"assignment names unknown variables {sorted(extra)}")
                for v, val in assignment.items():
                    if not target.contains(val):
                        raise ValueError(f"assignment sends {v!r} outside the target carrier")
        else:
            if assignment or source != target:
                raise ValueError(f"a {source.kind} algebra admits only its identity morphism")
        self.assignment = assignment

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and not self.assignment

    @staticmethod
    def identity(algebra: Algebra) -> "AlgebraMorphism":
        return AlgebraMorphism(algebra, algebra, {})

    def compose(self, inner: "AlgebraMorphism") -> "AlgebraMorphism":
        """self after inner (inner.target must equal self.source)."""
        if inner.target != self.source:
            raise ValueError("algebra morphisms do not compose")
        if inner.is_identity:
            return AlgebraMorphism(inner.source, self.target, self.assignment)
        if self.is_identity:
            return AlgebraMorphism(inner.source, self.target, inner.assignment)
        combined = {v: evaluate_term(val, self) for v, val in inner.assignment.items()}
        return AlgebraMorphism(inner.source, self.target, combined)

    def __eq__(self, other) -> bool:
        return (isinstance(other, AlgebraMorphism)
                and self.source == other.source
                and self.target == other.target
                and self.assignment == other.assignment)

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __repr__(self) -> str:
        if self.is_identity:
            return "AlgebraMorphism(id)"
        items = ", ".join(f"{v}->{render_value(t)}" for v, t in sorted(self.assignment.items()))
        return f"AlgebraMorphism({items})"


def evaluate_term(t: Value, h: AlgebraMorphism) -> Value:
    """Homomorphic image of a carrier value under a morphism."""
    if h.is_identity:
        if not h.source.contains(t):
            raise EvaluationError(f"{render_value(t)} is not in the carrier")
        return t
    if isinstance(t, Var):
        if t.name not in h.assignment:
            raise EvaluationError(f"variable {t.name!r} has no assignment")
        return h.assignment[t.name]
    if isinstance(t, Lit):
        if isinstance(h.target, NatPlus):
            return t.value
        if isinstance(h.target, TermAlg):
            return t
        raise EvaluationError(f"literal {t.value} has no image in a {h.target.kind} algebra")
    if isinstance(t, OpApp):
        if not h.target.interprets(t.op):
            raise EvaluationError(f"operation {t.op!r} is not interpreted in the target algebra")
        args = [evaluate_term(a, h) for a in t.args]
        if isinstance(h.target, NatPlus) and t.op == "+":
            return args[0] + args[1]
        return OpApp(t.op, tuple(args))
    raise EvaluationError(f"cannot evaluate {t!r}")


def apply_to_labelset(h: AlgebraMorphism, s: Iterable[Value]) -> LabelSet:
    """Elementwise image of a label set under an algebra morphism."""
    if h.is_identity:
        return LabelSet(s)
    return LabelSet(evaluate_term(v, h) for v in s)
