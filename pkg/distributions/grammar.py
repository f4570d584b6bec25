import json
import re

from common import LawSpecError
from .law import Law, LawKind

_LAW_RE = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def parse_law(text: str) -> Law:
    """
    Parse `dirac(3)`, `poisson(0.01)`, `geometric(0.5)`, `binomial(10, 0.1)`,
    `stable_tail(1.5, 0.4)` or `explicit([0.2, 0.5, 0.3])`.
    """
    match = _LAW_RE.match(text)
    if match is None:
        raise LawSpecError("not of the form name(args)", text)
    name, body = match.groups()
    try:
        kind = LawKind(name)
    except ValueError:
        raise LawSpecError(f"unknown law {name!r}", text) from None
    try:
        if kind == LawKind.EXPLICIT:
            probs = json.loads(body)
            if not isinstance(probs, list):
                raise ValueError
            return Law.explicit(probs)
        args = tuple(float(x) for x in body.split(",")) if body.strip() else ()
    except (ValueError, TypeError):
        raise LawSpecError("malformed arguments", text) from None
    law = Law(kind=kind, params=args)
    if kind == LawKind.STABLE_TAIL:
        law.pmf()
    return law


def coerce_law(value) -> Law:
    if isinstance(value, Law):
        return value
    if isinstance(value, str):
        return parse_law(value)
    if isinstance(value, dict):
        return Law.model_validate(value)
    raise LawSpecError(f"cannot read a law from {type(value).__name__}")
