"""Quotient Kripke models and answers mapped back to cells.

The minimal model's nodes are the equivalence classes computed by branching
bisimilarity on the concrete LTS encoding; its accessibility relation holds
between two classes when some member pair is ordered.  The result is a
reflexive Kripke model but in general not a poset (transitivity can fail), so
it is never re-interpreted as one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bisim import (
    DOWN, Partition, _matching_path, branching_partition, encode_concrete, quotient_lts,
)
from .checker import SatSet
from .errors import InputError
from .kripke import ReflexiveKripkeModel
from .logic import TOP, And, Atom, Eta, Formula, Not, Or
from .simplicial import PosetModel

__all__ = [
    "MinimalModel", "UnknownClassError",
    "minimal_model", "rmin_via_quotient_d", "map_back", "distinguishing_formula",
]


class UnknownClassError(InputError):
    """A class identifier that does not belong to the minimal model."""


def class_id(i: int) -> str:
    return f"C{i}"


@dataclass(frozen=True)
class MinimalModel:
    """Quotient of a poset model by logical equivalence.

    ``kripke`` is the quotient model over class identifiers ``C0, C1, ...``
    (ordered by each class's least element); ``partition`` maps the source
    elements to those classes.
    """

    kripke: ReflexiveKripkeModel
    partition: Partition
    source: PosetModel

    def class_of_element(self, element: str) -> str:
        return class_id(self.partition.class_of(element))

    def members_of(self, cid: str) -> frozenset[str]:
        try:
            i = int(cid.removeprefix("C"))
            return self.partition.classes[i]
        except (ValueError, IndexError):
            raise UnknownClassError(f"unknown class {cid!r}") from None


def minimal_model(p: PosetModel) -> MinimalModel:
    """Build the quotient model over branching-bisimilarity classes.

    The relation holds between classes with an ordered member pair, so it is
    reflexive by reflexivity of the order; the valuation is lifted from any
    member (all members agree, which is asserted).
    """
    part = branching_partition(encode_concrete(p))
    ids = [class_id(i) for i in range(len(part))]

    relation = set()
    for a in p.elements:
        ca = part.class_of(a)
        for b in p.up_set(a):
            relation.add((class_id(ca), class_id(part.class_of(b))))

    valuation = {}
    for i, block in enumerate(part.classes):
        vals = {p.valuation_of(w) for w in block}
        if len(vals) != 1:
            raise AssertionError(f"class {ids[i]} mixes valuations: {sorted(block)}")
        valuation[ids[i]] = vals.pop()

    kripke = ReflexiveKripkeModel(ids, relation, valuation, atoms=p.atoms)
    return MinimalModel(kripke=kripke, partition=part, source=p)


def rmin_via_quotient_d(p: PosetModel) -> frozenset[tuple[str, str]]:
    """The minimal model's relation recovered from the quotient LTS.

    Project the concrete LTS onto the branching partition and reverse its
    ``d`` transitions; must equal :func:`minimal_model`'s relation.
    """
    lts = encode_concrete(p)
    part = branching_partition(lts)
    quotient = quotient_lts(lts, part)
    name_to_id = {part.names[i]: class_id(i) for i in range(len(part))}
    return frozenset(
        (name_to_id[dst], name_to_id[src])
        for src, lab, dst in quotient.transitions
        if lab == DOWN
    )


def map_back(mm: MinimalModel, class_result: SatSet) -> list[bool]:
    """Expand a class-level answer to a per-cell boolean vector.

    Output order is the source model's canonical element order.
    """
    valid = {class_id(i) for i in range(len(mm.partition))}
    unknown = set(class_result.members) - valid
    if unknown:
        raise UnknownClassError(f"unknown classes in result: {sorted(unknown)}")
    hit = set(class_result.members)
    return [mm.class_of_element(w) in hit for w in mm.source.elements]


# -- distinguishing formulas -----------------------------------------------------

def _valuation_formula(atoms: tuple[str, ...], held: frozenset[str]) -> Formula:
    """Conjunction of literals pinning an exact atom set."""
    f: Formula | None = None
    for a in atoms:
        lit: Formula = Atom(a) if a in held else Not(Atom(a))
        f = lit if f is None else And(f, lit)
    return f if f is not None else TOP


def _can_reach(p: PosetModel, w: str, allowed: frozenset[str], targets: frozenset[str]) -> bool:
    return _matching_path(p, w, allowed, set(targets))


def _refine_with_formulas(p: PosetModel):
    """Partition refinement that carries an exact formula for every class.

    Starts from the valuation partition (pinned by literal conjunctions) and
    repeatedly splits a class on a reach capability some members have and
    others lack; the capability is expressible as an eta formula over the
    current class formulas, which keeps every class exactly characterised.
    Returns the final blocks, their formulas, and the list of splits as
    (formula, members-satisfying-it, members-not) events.
    """
    by_val: dict[frozenset[str], list[str]] = {}
    for w in p.elements:
        by_val.setdefault(p.valuation_of(w), []).append(w)
    order = {w: i for i, w in enumerate(p.elements)}
    blocks = [frozenset(ws) for ws in by_val.values()]
    blocks.sort(key=lambda b: min(order[w] for w in b))
    formulas = [_valuation_formula(p.atoms, p.valuation_of(next(iter(b)))) for b in blocks]
    splits: list[tuple[Formula, frozenset[str], frozenset[str]]] = []

    changed = True
    while changed:
        changed = False
        for k, block in enumerate(blocks):
            if len(block) < 2:
                continue
            for u_idx in range(len(blocks)):
                allowed = block | blocks[u_idx]
                for d_idx in range(len(blocks)):
                    targets = blocks[d_idx]
                    have = frozenset(
                        w for w in block if _can_reach(p, w, allowed, targets)
                    )
                    if have and have != block:
                        cond = (
                            formulas[k]
                            if u_idx == k
                            else Or(formulas[k], formulas[u_idx])
                        )
                        witness = Eta(cond, formulas[d_idx])
                        lack = block - have
                        splits.append((witness, have, lack))
                        blocks[k] = have
                        blocks.append(lack)
                        formulas.append(And(formulas[k], Not(witness)))
                        formulas[k] = And(formulas[k], witness)
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return blocks, formulas, splits


def distinguishing_formula(p: PosetModel, a: str, b: str) -> Formula | None:
    """An eta-pure formula separating two cells, or None when none exists.

    None is returned exactly when the cells are logically equivalent.  When a
    formula is returned it holds at ``a`` and fails at ``b``: either an atom
    literal (different valuations) or the reach capability recorded by the
    first refinement split that separated the pair.
    """
    p.index_of(a)
    p.index_of(b)
    if a == b:
        return None
    va, vb = p.valuation_of(a), p.valuation_of(b)
    if va != vb:
        gained = sorted(va - vb)
        if gained:
            return Atom(gained[0])
        return Not(Atom(sorted(vb - va)[0]))
    _, _, splits = _refine_with_formulas(p)
    for witness, have, lack in splits:
        if a in have and b in lack:
            return witness
        if b in have and a in lack:
            return Not(witness)
    return None
