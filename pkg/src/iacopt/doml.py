"""Parser and renderer for the ``optimization`` block of DOML documents.

Grammar (tokens are whitespace separated)::

    doml         := "optimization" IDENT "{" objectives requirements "}"
    objectives   := "objectives" "{" objective+ "}"
    objective    := STRING "=>" ("min" | "max")
    requirements := "nonfunctional_requirements" "{" requirement+ "}"
    requirement  := IDENT STRING clause? "=>" STRING ";"
    clause       := ("max" | "min") NUMBER | "values" STRING

The requirement variant is chosen from the target string after ``=>``; a
requirement whose description is ``"elements"`` lists deployment slots instead.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from iacopt.catalog import ElementType

METRICS = ("cost", "availability", "performance")
CATEGORICAL_PROPERTIES = ("region", "provider")
ALLOWED_SENSES = {"cost": "min", "availability": "max", "performance": "max"}

_ELEMENT_TOKENS = {
    "storage": ElementType.STORAGE,
    "st": ElementType.STORAGE,
    "db": ElementType.DB,
    "vm": ElementType.VM,
}
_ELEMENT_NAMES = {ElementType.STORAGE: "Storage", ElementType.DB: "DB", ElementType.VM: "VM"}


class DomlError(ValueError):
    """Semantic problem in an otherwise well-formed document."""


class DomlSyntaxError(DomlError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ObjectiveSpec:
    metric: str
    sense: str

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise DomlError(f"unknown objective metric {self.metric!r}")
        if self.sense not in ("min", "max"):
            raise DomlError(f"unknown objective sense {self.sense!r}")
        if ALLOWED_SENSES[self.metric] != self.sense:
            raise DomlError(
                f"objective {self.metric!r} can only be {ALLOWED_SENSES[self.metric]}imized"
            )


@dataclass(frozen=True)
class Bound:
    metric: str
    kind: str  # "max": value must stay <= bound; "min": value must stay >= bound
    value: float

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise DomlError(f"unknown bound metric {self.metric!r}")
        if self.kind not in ("max", "min"):
            raise DomlError(f"unknown bound kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise DomlError("bound value must be finite")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Categorical:
    property: str
    allowed: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.property not in CATEGORICAL_PROPERTIES:
            raise DomlError(f"unknown categorical property {self.property!r}")
        object.__setattr__(self, "allowed", tuple(self.allowed))
        if not self.allowed:
            raise DomlError("categorical requirement needs at least one allowed value")


@dataclass(frozen=True)
class Elements:
    slots: tuple[ElementType, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "slots", tuple(self.slots))
        if not self.slots:
            raise DomlError("elements requirement must list at least one slot")


RequirementSpec = Union[Bound, Categorical, Elements]


@dataclass(frozen=True)
class OptimizationSpec:
    name: str
    objectives: tuple[ObjectiveSpec, ...]
    requirements: tuple[RequirementSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "requirements", tuple(self.requirements))
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", self.name):
            raise DomlError(f"invalid optimization name {self.name!r}")
        if len(self.objectives) < 2:
            raise DomlError("at least two objectives required")
        if len(self.objectives) > 3:
            raise DomlError("at most three objectives supported")
        metrics = [o.metric for o in self.objectives]
        if len(set(metrics)) != len(metrics):
            raise DomlError(f"duplicate objective metric in {metrics}")
        n_elements = sum(isinstance(r, Elements) for r in self.requirements)
        if n_elements != 1:
            raise DomlError(
                "missing elements requirement" if n_elements == 0
                else "exactly one elements requirement allowed"
            )

    @property
    def elements(self) -> Elements:
        return next(r for r in self.requirements if isinstance(r, Elements))

    @property
    def bounds(self) -> tuple[Bound, ...]:
        return tuple(r for r in self.requirements if isinstance(r, Bound))

    @property
    def categoricals(self) -> tuple[Categorical, ...]:
        return tuple(r for r in self.requirements if isinstance(r, Categorical))


# --------------------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"[^"\n]*")
  | (?P<arrow>=>)
  | (?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[{};])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            if text[pos] == '"':
                raise DomlSyntaxError("unterminated string", line, column)
            raise DomlSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), line, column))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise DomlSyntaxError(f"{message}, found {found}", tok.line, tok.column)

    def take(self, kind: str, text: str | None = None) -> _Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            self.fail(f"expected {text!r}" if text else f"expected {kind}")
        self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def string(self) -> tuple[str, _Token]:
        tok = self.take("string")
        return tok.text[1:-1], tok

    def document(self) -> OptimizationSpec:
        self.take("ident", "optimization")
        name = self.take("ident").text
        self.take("punct", "{")
        objectives = self.objectives()
        requirements = self.requirements()
        self.take("punct", "}")
        self.take("eof")
        return OptimizationSpec(name, tuple(objectives), tuple(requirements))

    def objectives(self) -> list[ObjectiveSpec]:
        self.take("ident", "objectives")
        self.take("punct", "{")
        result = []
        while self.at("string"):
            metric, tok = self.string()
            self.take("arrow")
            if not (self.at("ident", "min") or self.at("ident", "max")):
                self.fail("expected 'min' or 'max'")
            sense = self.take("ident").text
            key = metric.strip().lower()
            if key not in METRICS:
                raise DomlSyntaxError(f"unknown objective metric {metric!r}", tok.line, tok.column)
            if any(o.metric == key for o in result):
                raise DomlSyntaxError(f"duplicate objective metric {key!r}", tok.line, tok.column)
            try:
                result.append(ObjectiveSpec(key, sense))
            except DomlError as exc:
                raise DomlSyntaxError(str(exc), tok.line, tok.column) from None
        if len(result) < 2:
            # an empty or single-entry block is a semantic error, not a token error
            if not self.at("punct", "}"):
                self.fail("expected objective string or '}'")
            raise DomlError("at least two objectives required")
        self.take("punct", "}")
        return result

    def requirements(self) -> list[RequirementSpec]:
        self.take("ident", "nonfunctional_requirements")
        self.take("punct", "{")
        result = [self.requirement()]
        while self.at("ident"):
            result.append(self.requirement())
        self.take("punct", "}")
        return result

    def requirement(self) -> RequirementSpec:
        self.take("ident")
        description, _ = self.string()
        clause = None
        if self.at("ident", "max") or self.at("ident", "min"):
            kind = self.take("ident").text
            num = self.take("number")
            clause = ("bound", kind, float(num.text), num)
        elif self.at("ident", "values"):
            self.take("ident")
            values, tok = self.string()
            clause = ("values", values, tok)
        elif not self.at("arrow"):
            self.fail("expected 'max', 'min', 'values' or '=>'")
        self.take("arrow")
        target, target_tok = self.string()
        self.take("punct", ";")

        def err(message):
            return DomlSyntaxError(message, target_tok.line, target_tok.column)

        if description.strip().lower() == "elements":
            if clause is not None:
                raise err("elements requirement takes no clause")
            slots = []
            for part in target.split(","):
                token = part.strip().lower()
                if token not in _ELEMENT_TOKENS:
                    raise err(f"unknown element type {part.strip()!r}")
                slots.append(_ELEMENT_TOKENS[token])
            return Elements(tuple(slots))
        key = target.strip().lower()
        if key in METRICS:
            if clause is None or clause[0] != "bound":
                raise err(f"requirement on {key!r} needs a 'max' or 'min' bound clause")
            if not math.isfinite(clause[2]):
                raise err("bound value must be finite")
            return Bound(key, clause[1], clause[2])
        if key in CATEGORICAL_PROPERTIES:
            if clause is None or clause[0] != "values":
                raise err(f"requirement on {key!r} needs a 'values' clause")
            allowed = tuple(v.strip() for v in clause[1].split(",") if v.strip())
            if not allowed:
                raise err("'values' clause lists no values")
            return Categorical(key, allowed)
        raise err(f"unknown requirement target {target!r}")


def parse_doml(text: str | bytes) -> OptimizationSpec:
    """Parse a DOML optimization block into an :class:`OptimizationSpec`.

    Raises:
        DomlSyntaxError: malformed token stream or invalid requirement, with position.
        DomlError: semantic violations (objective counts, missing elements list).
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DomlError(f"document is not valid UTF-8: {exc}") from None
    return _Parser(text).document()


# --------------------------------------------------------------------------- render


def _format_number(value: float) -> str:
    return repr(float(value))


def _bound_description(bound: Bound) -> str:
    op = "<=" if bound.kind == "max" else ">="
    return f"{bound.metric.capitalize()} {op} {_format_number(bound.value)}"


def render_doml(spec: OptimizationSpec) -> str:
    lines = [f"optimization {spec.name} {{", "  objectives {"]
    for objective in spec.objectives:
        lines.append(f'    "{objective.metric}" => {objective.sense}')
    lines += ["  }", "  nonfunctional_requirements {"]
    for i, req in enumerate(spec.requirements, start=1):
        if isinstance(req, Bound):
            body = (
                f'"{_bound_description(req)}" {req.kind} {_format_number(req.value)}'
                f' => "{req.metric}"'
            )
        elif isinstance(req, Categorical):
            body = f'"{req.property.capitalize()}" values "{", ".join(req.allowed)}" => "{req.property}"'
        else:
            body = f'"elements" => "{", ".join(_ELEMENT_NAMES[s] for s in req.slots)}"'
        lines.append(f"    req{i} {body};")
    lines += ["  }", "}"]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------- instance suite

SUITE_LAYOUTS = ((0, 4, 4), (1, 1, 1), (2, 2, 2), (4, 3, 3), (5, 5, 5), (6, 0, 0))
# two-objective instances pair cost with performance for these layouts, availability otherwise
_COST_PERFORMANCE_LAYOUTS = {(0, 4, 4), (5, 5, 5)}
SUITE_COST_MAX = 200.0
SUITE_AVAILABILITY_MIN = 96.0


def instance_name(n_objectives: int, vms: int, dbs: int, sts: int) -> str:
    return f"DOML_{n_objectives}_{vms}-{dbs}-{sts}"


def suite_specs() -> dict[str, OptimizationSpec]:
    """The twelve benchmark instances as parsed specs, in suite order."""
    suite = {}
    for n_objectives in (2, 3):
        for vms, dbs, sts in SUITE_LAYOUTS:
            if n_objectives == 3:
                metrics = METRICS
            elif (vms, dbs, sts) in _COST_PERFORMANCE_LAYOUTS:
                metrics = ("cost", "performance")
            else:
                metrics = ("cost", "availability")
            name = instance_name(n_objectives, vms, dbs, sts)
            slots = (ElementType.STORAGE,) * sts + (ElementType.DB,) * dbs + (ElementType.VM,) * vms
            suite[name] = OptimizationSpec(
                name=name.replace("-", "_"),
                objectives=tuple(ObjectiveSpec(m, ALLOWED_SENSES[m]) for m in metrics),
                requirements=(
                    Bound("cost", "max", SUITE_COST_MAX),
                    Bound("availability", "min", SUITE_AVAILABILITY_MIN),
                    Categorical("region", ("00EU",)),
                    Elements(slots),
                ),
            )
    return suite


def generate_instance_suite() -> dict[str, str]:
    """Render the twelve benchmark instances as DOML documents keyed by instance name."""
    return {name: render_doml(spec) for name, spec in suite_specs().items()}


def parse_instance_name(name: str) -> tuple[int, int, int, int] | None:
    """Split ``DOML_A_x-y-z`` into ``(A, x, y, z)``; ``None`` when the name does not match."""
    m = re.fullmatch(r"DOML_(\d+)_(\d+)[-_](\d+)[-_](\d+)", name)
    return tuple(int(g) for g in m.groups()) if m else None
