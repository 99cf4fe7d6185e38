"""Step-by-step derivation of the normal-ordered position operators."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .expr import Expression
from .parser import parse_corpus
from .rules import (
    apply_orthogonality,
    canonical_equal,
    canonicalize,
    collapse_delta,
    collapse_spin,
    integrate_x,
    normal_order,
    time_to_tau,
)

PIPELINE = (
    ("integrate_x", integrate_x),
    ("time_to_tau", time_to_tau),
    ("collapse_delta", collapse_delta),
    ("orthogonality", apply_orthogonality),
    ("collapse_spin", collapse_spin),
    ("normal_order", normal_order),
    ("canonicalize", canonicalize),
)


def corpus_text(name: str) -> str:
    return resources.files("diracpos.corpus").joinpath(name).read_text()


def templates(mu: int) -> dict[str, Expression]:
    if mu not in (0, 1):
        raise ValueError("mu must be 0 (temporal) or 1 (spatial)")
    return parse_corpus(corpus_text("templates.txt").replace("MU", str(mu)))


def targets() -> dict[str, Expression]:
    return parse_corpus(corpus_text("targets.txt"))


@dataclass
class Derivation:
    mu: int
    stages: dict[str, list[tuple[str, Expression]]] = field(default_factory=dict)
    parts: dict[str, Expression] = field(default_factory=dict)
    result: Expression = Expression(())

    def report(self) -> str:
        out = []
        for name, steps in self.stages.items():
            out.append(f"== {name}")
            for step, e in steps:
                out.append(f"-- {step}\n{e}")
        out.append(f"== total\n{self.result}")
        return "\n".join(out)


def derive_position(mu: int) -> Derivation:
    d = Derivation(mu)
    total = Expression(())
    for name, e in templates(mu).items():
        steps = [("template", e)]
        for step, rule in PIPELINE:
            e = rule(e)
            steps.append((step, e))
        d.stages[name] = steps
        d.parts[name] = e
        total = total + e
    d.result = canonicalize(total)
    return d


def check_against_target(mu: int):
    """(equal, diff, derivation) for the temporal (0) or spatial (1) operator."""
    d = derive_position(mu)
    target = targets()["temporal" if mu == 0 else "spatial"]
    ok, diff = canonical_equal(d.result, target)
    return ok, diff, d
