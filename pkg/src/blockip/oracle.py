"""The linear-comparison protocol shared by every solver in the package.

A *linear algorithm* is written as a generator.  Each time it needs to know how
a form over its hidden inputs compares to zero it yields a batch (a list) of
:class:`~blockip.exactnum.Affine` forms and is resumed with the list of signs.
Its ``return`` value is the result.  Batches model one parallel step: forms in
the same batch are independent of each other's answers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields
from typing import Callable, Iterable, Sequence

from .exactnum import Affine, EpsValue, UnboundVariable, lex_sign, rat

__all__ = [
    "Counters",
    "UnboundVariable",
    "answer_numeric",
    "ask",
    "drive",
    "translate_inner_query",
]


@dataclass
class Counters:
    """Observational operation counts; only ever incremented."""

    total_ops: int = 0
    lambda_queries: int = 0
    objective_queries: int = 0
    parallel_rounds: int = 0
    block_steps: int = 0
    vertices_collected: int = 0
    dp_states: int = 0

    def merge(self, other: "Counters") -> "Counters":
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def answer_numeric(query: Affine, binding) -> int:
    """Sign of a query once every variable in its support is bound to a rational."""
    if not isinstance(query, Affine):
        query = Affine.constant(query)
    return lex_sign(query.evaluate(binding))


def translate_inner_query(query: Affine, inner_keys: Sequence, A_i: Sequence[Sequence],
                          c_i: Sequence, lam_keys: Sequence) -> Affine:
    """Rewrite a query over a block objective ``cbar_i`` in terms of the multipliers.

    Substitutes ``cbar_i = c_i - A_i^T lam``: the coefficient vector ``u`` of the
    query contributes ``u . c_i`` to the offset and ``-(A_i u)`` on ``lam``.
    """
    mapping = {}
    for k, key in enumerate(inner_keys):
        form = Affine.constant(c_i[k]) if not isinstance(c_i[k], Affine) else c_i[k]
        for j, lk in enumerate(lam_keys):
            a = A_i[j][k]
            if a:
                form = form - Affine.var(lk, a)
        mapping[key] = form
    return query.substitute(mapping)


def ask(form):
    """Generator: sign of ``form``, forwarding only its eps-free variable part outward.

    Infinitesimals are resolved locally: if the outward answer is 0 the eps
    coefficients decide lexicographically.
    """
    if isinstance(form, Affine):
        if form.terms:
            (s,) = yield [form.without_eps()]
            if s:
                return s
            return lex_sign(EpsValue(0, form.eps))
        return lex_sign(form)
    if isinstance(form, EpsValue):
        return lex_sign(form)
    return lex_sign(rat(form))


def drive(solver, answerer: Callable[[Affine], int], counters: Counters | None = None):
    """Run a query generator to completion, answering each form with ``answerer``."""
    try:
        batch = next(solver)
        while True:
            if counters is not None:
                counters.parallel_rounds += 1
                counters.objective_queries += len(batch)
                counters.total_ops += len(batch)
            batch = solver.send([answerer(q) for q in batch])
    except StopIteration as stop:
        return stop.value


def numeric_answerer(binding) -> Callable[[Affine], int]:
    return lambda q: answer_numeric(q, binding)


def sort_forms(items: Iterable, key_form: Callable):
    """Generator: stable merge sort of ``items`` by the forms ``key_form(item)``.

    Comparisons of variable-free forms are settled locally; the rest are asked.
    """
    items = list(items)
    if len(items) <= 1:
        return items
    mid = len(items) // 2
    left = yield from sort_forms(items[:mid], key_form)
    right = yield from sort_forms(items[mid:], key_form)
    out = []
    i = j = 0
    while i < len(left) and j < len(right):
        diff = key_form(left[i]) - key_form(right[j])
        s = yield from ask(diff)
        if s <= 0:
            out.append(left[i])
            i += 1
        else:
            out.append(right[j])
            j += 1
    out.extend(left[i:])
    out.extend(right[j:])
    return out
