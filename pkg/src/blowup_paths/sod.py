"""Symbolic algebra of the blowup's two-component decompositions.

The decompositions mutation-equivalent to ``<O_C(-1), D^b(Y)>`` form the
two-parameter family

    F1(k) = <O_C(k), f^L_{k+1} D^b(Y)>   (exceptional object on the left)
    F2(k) = <f^L_k D^b(Y), O_C(k)>       (exceptional object on the right)

with ``f^L_k = f^*(-) (x) O(-kC)``.  Labels, not categories, are
manipulated here; the mutation action is index arithmetic frozen from the
Serre-functor computation below.

Derivation (``S_X = (-) (x) O(K_X)[2]``, ``K_X = f^*K_Y + C``):

* ``S_X(f^L_{k+1} D^b(Y)) = f^L_k D^b(Y)`` -- the pullback of ``K_Y`` and
  the shift preserve the subcategory, while ``(x) O(C)`` moves ``f^*E (x)
  O(-(k+1)C)`` to ``f^*E (x) O(-kC)``;
* ``S_X(<O_C(k)>) = <O_C(k-1)>`` and ``S_X^{-1}(<O_C(k)>) = <O_C(k+1)>``
  -- ``O(f^*K_Y)`` restricts trivially to ``C`` and ``O(C)|_C = O_C(-1)``.

With left mutation ``<D1, D2> -> <S(D2), D1>`` and right mutation
``<D1, D2> -> <D2, S^{-1}(D1)>`` this gives the chain

    ... --left--> F1(k) --left--> F2(k) --left--> F1(k-1) --left--> ...

and right mutation walks it the other way.  Under the bijection with
recollements (``F2(m) <-> R(m)``, ``F1(k) <-> L(k)``) the left mutation
corresponds to passing to the lower recollement, matching
``lower(R(k+1)) = L(k)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

EXC_LEFT = "ExcLeft"
EXC_RIGHT = "ExcRight"


def _oc(k: int) -> str:
    return "O_C" if k == 0 else f"O_C({k})"


def _fld(k: int) -> str:
    return "D^b(Y)" if k == 0 else f"f^L_{k} D^b(Y)"


@dataclass(frozen=True)
class SodLabel:
    """One member of the two-parameter family of decompositions."""

    orientation: str  # EXC_LEFT or EXC_RIGHT
    k: int

    def __post_init__(self):
        if self.orientation not in (EXC_LEFT, EXC_RIGHT):
            raise ValueError(f"unknown orientation {self.orientation!r}")

    def render(self) -> str:
        if self.orientation == EXC_LEFT:
            return f"<{_oc(self.k)}, {_fld(self.k + 1)}>"
        return f"<{_fld(self.k)}, {_oc(self.k)}>"

    def to_json(self) -> str:
        return json.dumps({"orientation": self.orientation, "k": self.k,
                           "rendered": self.render()}, sort_keys=True)


@dataclass(frozen=True)
class RecollementLabel:
    """``R(k)`` or ``L(k)`` with the functor names of its diagram."""

    tag: str  # "R" or "L"
    k: int

    def __post_init__(self):
        if self.tag not in ("R", "L"):
            raise ValueError(f"unknown recollement tag {self.tag!r}")

    def functors(self) -> tuple:
        m = self.k
        if self.tag == "R":
            return (f"f^L_{m}", f"f_{m + 1}", f"f_{m}", "j", f"rho_{m}")
        return ("j", f"rho_{m + 1}", f"rho_{m}", f"f_{m + 1}", f"f^L_{m + 1}")

    def render(self) -> str:
        return f"{self.tag}({self.k})"


def mutate(sod: SodLabel, direction: str) -> SodLabel:
    """Left/right mutation inside the family (see module derivation).

    ``left . right = right . left = id``.
    """
    if direction == "left":
        if sod.orientation == EXC_LEFT:
            return SodLabel(EXC_RIGHT, sod.k)
        return SodLabel(EXC_LEFT, sod.k - 1)
    if direction == "right":
        if sod.orientation == EXC_RIGHT:
            return SodLabel(EXC_LEFT, sod.k)
        return SodLabel(EXC_RIGHT, sod.k + 1)
    raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")


def twist_by_oc(label):
    """Tensoring by ``O(C)``: shifts every index by ``-1``.

    ``L(k) -> L(k-1)`` and ``R(k) -> R(k-1)`` on recollement labels; on
    decomposition labels the orientation is preserved and ``k`` drops by
    one (``O_C(k) (x) O(C) = O_C(k-1)`` and ``f^L_k`` becomes
    ``f^L_{k-1}``).
    """
    if isinstance(label, SodLabel):
        return SodLabel(label.orientation, label.k - 1)
    if isinstance(label, RecollementLabel):
        return RecollementLabel(label.tag, label.k - 1)
    raise TypeError(f"cannot twist {type(label).__name__}")


def recollement_of(sod: SodLabel) -> RecollementLabel:
    """The recollement whose embedded components are the SOD's components:
    ``F2(m) -> R(m)`` and ``F1(k) -> L(k)``."""
    if sod.orientation == EXC_RIGHT:
        return RecollementLabel("R", sod.k)
    return RecollementLabel("L", sod.k)


def sod_of(rec: RecollementLabel) -> SodLabel:
    if rec.tag == "R":
        return SodLabel(EXC_RIGHT, rec.k)
    return SodLabel(EXC_LEFT, rec.k)


def lower_recollement(rec: RecollementLabel) -> RecollementLabel:
    """``lower(R(k+1)) = L(k)``; equivalently left mutation downstairs."""
    return recollement_of(mutate(sod_of(rec), "left"))


def upper_recollement(rec: RecollementLabel) -> RecollementLabel:
    """``upper(L(k)) = R(k+1)``; equivalently right mutation downstairs."""
    return recollement_of(mutate(sod_of(rec), "right"))


def mutation_orbit(start: SodLabel, depth: int) -> set:
    """BFS orbit of ``start`` under left/right mutations up to ``depth``."""
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for lab in frontier:
            for d in ("left", "right"):
                m = mutate(lab, d)
                if m not in seen:
                    seen.add(m)
                    nxt.append(m)
        frontier = nxt
    return seen
