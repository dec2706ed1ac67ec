"""State-family generators and the generic scale-rule engine.

A scale rule describes one recursion step: the state at the next scale is a
sum of ``s`` coefficient records, each a tensor product of ``c`` slot vectors
drawn per-slot from small lookup tables (the predecessor state, a basis
string, or an explicitly supplied state), every record carrying magnitude
``1/sqrt(s)`` and a root-of-unity phase.  Iterating a rule from an initial
single-qudit state produces the self-similar families this package studies.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import GuardExceededError, ScaleRuleError
from .states import DEFAULT_PHASE_ORDER, Amplitude, Provenance, SparseState, superpose

# Constructors refuse outputs beyond these desk-scale ceilings.
MAX_ENTRIES = 10**6
MAX_QUDITS = 10**4

# Numerical tolerance for slot orthonormality checks.
ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class FractalParams:
    """Recursion parameters: ``c`` subsystems per scale change, probability
    scaling factor ``s``, and scale index ``n``."""

    c: int
    s: int
    n: int = 0

    def __post_init__(self) -> None:
        if self.c <= 1:
            raise ValueError(f"c must exceed 1, got {self.c}")
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")

    @property
    def dimension(self) -> float:
        """Self-similarity dimension ln(c)/ln(s), read as log2(c) when s == 1."""
        if self.s == 1:
            return math.log2(self.c)
        return math.log(self.c) / math.log(self.s)


@dataclass(frozen=True)
class Predecessor:
    """Slot entry standing for the previous-scale state."""


@dataclass(frozen=True)
class BasisSlot:
    """Slot entry naming a computational basis string of the previous scale."""

    digits: tuple[int, ...]


@dataclass(frozen=True)
class NamedSlot:
    """Slot entry holding an explicitly supplied normalized state.

    ``path`` records the state-file origin when the rule was read from disk,
    and is required to serialize the rule back out.
    """

    state: SparseState
    path: str | None = None


SlotVector = Union[Predecessor, BasisSlot, NamedSlot]


@dataclass(frozen=True)
class Coefficient:
    """One nonzero record: per-slot table indices plus a phase index.

    The magnitude is implicit: every record weighs ``1/sqrt(s)``.
    """

    indices: tuple[int, ...]
    phase_index: int = 0


@dataclass(frozen=True)
class ScaleRule:
    """One recursion step: slot tables plus the nonzero coefficient records."""

    params: FractalParams
    slot_tables: tuple[Mapping[int, SlotVector], ...]
    coefficients: tuple[Coefficient, ...]
    phase_order: int = DEFAULT_PHASE_ORDER

    def __post_init__(self) -> None:
        c, s = self.params.c, self.params.s
        if len(self.slot_tables) != c:
            raise ScaleRuleError(f"rule has {len(self.slot_tables)} slot tables, expected c = {c}")
        object.__setattr__(self, "slot_tables", tuple(dict(t) for t in self.slot_tables))
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) != s:
            raise ScaleRuleError(f"rule has {len(self.coefficients)} coefficients, expected s = {s}")
        seen: set[tuple[int, ...]] = set()
        for coeff in self.coefficients:
            if len(coeff.indices) != c:
                raise ScaleRuleError(f"coefficient {coeff.indices} does not have {c} indices")
            if any(i < 0 or i >= s for i in coeff.indices):
                raise ScaleRuleError(f"coefficient indices {coeff.indices} outside [0, {s})")
            if coeff.indices in seen:
                raise ScaleRuleError(f"duplicate coefficient indices {coeff.indices}")
            seen.add(coeff.indices)

    @property
    def c(self) -> int:
        return self.params.c

    @property
    def s(self) -> int:
        return self.params.s

    def referenced_cells(self) -> tuple[tuple[int, int], ...]:
        """(slot, index) pairs used by at least one coefficient, ordered."""
        cells: list[tuple[int, int]] = []
        for slot in range(self.c):
            for index in sorted({coeff.indices[slot] for coeff in self.coefficients}):
                cells.append((slot, index))
        return tuple(cells)

    def resolve(self, slot: int, index: int, prev: SparseState) -> SparseState:
        """Resolve one slot-table cell against the predecessor state."""
        table = self.slot_tables[slot]
        if index not in table:
            raise ScaleRuleError(f"slot {slot + 1} has no entry for index {index}")
        entry = table[index]
        if isinstance(entry, Predecessor):
            return prev
        if isinstance(entry, BasisSlot):
            if len(entry.digits) != prev.num_qudits:
                raise ScaleRuleError(
                    f"slot {slot + 1} basis string has {len(entry.digits)} digits, "
                    f"expected {prev.num_qudits}"
                )
            return SparseState.basis_state(prev.local_dim, entry.digits, prev.phase_order)
        resolved = entry.state
        if resolved.local_dim != prev.local_dim or resolved.num_qudits != prev.num_qudits:
            raise ScaleRuleError(
                f"slot {slot + 1} state is {resolved.num_qudits} qudits of dimension "
                f"{resolved.local_dim}; expected {prev.num_qudits} of {prev.local_dim}"
            )
        return resolved

    def distinct_slot_states(self, slot: int, prev: SparseState) -> list[SparseState]:
        """Distinct resolved vectors referenced in one slot (exact dedup)."""
        states: list[SparseState] = []
        for index in sorted({coeff.indices[slot] for coeff in self.coefficients}):
            candidate = self.resolve(slot, index, prev)
            if not any(candidate == known for known in states):
                states.append(candidate)
        return states


def check_rule_against(prev: SparseState, rule: ScaleRule) -> None:
    """Raise :class:`ScaleRuleError` unless the rule is applicable to ``prev``.

    Checks slot resolution, predecessor presence (by exact state equality),
    and pairwise slot orthonormality at tolerance ``ORTHO_TOL``.
    """
    predecessor_found = False
    for slot, index in rule.referenced_cells():
        if rule.resolve(slot, index, prev) == prev:
            predecessor_found = True
    if not predecessor_found:
        raise ScaleRuleError("no referenced slot resolves to the predecessor state")
    for slot in range(rule.c):
        states = rule.distinct_slot_states(slot, prev)
        for i, u in enumerate(states):
            if abs(u.inner_product(u) - 1.0) > ORTHO_TOL:
                raise ScaleRuleError(f"slot {slot + 1} vector {i} is not normalized")
            for v in states[i + 1 :]:
                if abs(u.inner_product(v)) > ORTHO_TOL:
                    raise ScaleRuleError(f"slot {slot + 1} vectors are not orthogonal")


def apply_scale_rule(prev: SparseState, rule: ScaleRule, *, validate: bool = True) -> SparseState:
    """One recursion step: sum the rule's records over tensor products of
    resolved slot vectors.

    The result has ``c`` times the qudits of ``prev`` and exact norm 1; the
    provenance scale index is incremented when ``prev`` carries one.
    """
    if validate:
        check_rule_against(prev, rule)
    if prev.num_qudits * rule.c > MAX_QUDITS:
        raise GuardExceededError(f"output would exceed {MAX_QUDITS} qudits")
    products: list[SparseState] = []
    for coeff in rule.coefficients:
        product = rule.resolve(0, coeff.indices[0], prev)
        for slot in range(1, rule.c):
            product = product.tensor(rule.resolve(slot, coeff.indices[slot], prev))
        products.append(product)
    order = math.lcm(rule.phase_order, *(p.phase_order for p in products))
    step = order // rule.phase_order
    terms: list[tuple[int, SparseState]] = []
    for coeff, product in zip(rule.coefficients, products):
        scaled = product.promoted(order).scaled(inv_sqrt=rule.s)
        terms.append(((coeff.phase_index * step) % order, scaled))
    result = superpose(terms)
    if len(result.entries) > MAX_ENTRIES:
        raise GuardExceededError(f"output exceeds {MAX_ENTRIES} entries")
    if result.norm_squared() != Fraction(1):
        raise ScaleRuleError("scale rule output is not normalized; slot products must be orthonormal")
    provenance = None
    if prev.provenance is not None and prev.provenance.n is not None:
        provenance = Provenance(prev.provenance.family, rule.c, rule.s, prev.provenance.n + 1)
    return dataclasses.replace(result, provenance=provenance)


def build_initial(local_dim: int) -> SparseState:
    """The single-qudit starting state |0> in dimension ``local_dim``."""
    if local_dim < 2:
        raise ValueError(f"local_dim must be >= 2, got {local_dim}")
    return SparseState.basis_state(local_dim, (0,))


def representative_rule(c: int, s: int, step: int, local_dim: int) -> ScaleRule:
    """The canonical rule taking the representative family from scale ``step``
    to ``step + 1``: the predecessor in slot 1, diagonal basis strings
    ``|j...j>`` in the remaining slots, all phases zero."""
    params = FractalParams(c, s, step)
    if local_dim < s:
        raise ValueError(f"local_dim {local_dim} cannot index {s} coefficient branches")
    width = c**step
    first: dict[int, SlotVector] = {i: Predecessor() for i in range(s)}
    rest: list[dict[int, SlotVector]] = [
        {i: BasisSlot((i,) * width) for i in range(s)} for _ in range(c - 1)
    ]
    coefficients = tuple(Coefficient((i,) * c) for i in range(s))
    return ScaleRule(params, (first, *rest), coefficients)


def build_representative(c: int, s: int, n: int, local_dim: int) -> SparseState:
    """Closed-form representative state at scale ``n``: support ``s**n``,
    uniform outcome probability ``s**-n`` over ``c**n`` qudits.

    Equals ``n`` iterations of :func:`representative_rule` from |0>.
    """
    params = FractalParams(c, s, n)
    if local_dim < max(2, s):
        raise ValueError(f"local_dim {local_dim} too small for s = {s}")
    if c**n > MAX_QUDITS:
        raise GuardExceededError(f"{c}**{n} qudits exceeds {MAX_QUDITS}")
    if s**n > MAX_ENTRIES:
        raise GuardExceededError(f"{s}**{n} entries exceeds {MAX_ENTRIES}")
    state = build_initial(local_dim)
    for m in range(n):
        width = (c - 1) * c**m
        block = SparseState(
            local_dim,
            width,
            state.phase_order,
            {(j,) * width: Amplitude.inv_sqrt(s) for j in range(s)},
        )
        state = state.tensor(block)
    provenance = Provenance("representative", c, s, n)
    return dataclasses.replace(state, provenance=provenance)


def build_cantor(n: int) -> SparseState:
    """The qutrit family with the Cantor set's parameters c = 2, s = 3."""
    state = build_representative(2, 3, n, local_dim=3)
    return dataclasses.replace(state, provenance=Provenance("cantor", 2, 3, n))


def build_bell_pair(sign: int) -> SparseState:
    """The Bell pair (|01> + sign |10>)/sqrt(2)."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    order = DEFAULT_PHASE_ORDER
    entries = {
        (0, 1): Amplitude.inv_sqrt(2),
        (1, 0): Amplitude.inv_sqrt(2, phase_index=0 if sign == 1 else order // 2),
    }
    return SparseState(2, 2, order, entries, Provenance("bellgem", 2, 2, 0))


def build_gem_step(i: SparseState, j: SparseState, sign: int) -> SparseState:
    """The symmetrized pair (i x j + sign j x i)/sqrt(2) over orthogonal
    equal-size qubit states; cross terms cancel or double exactly."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if i.local_dim != 2 or j.local_dim != 2:
        raise ValueError("gem steps are defined over qubit states")
    if i.num_qudits != j.num_qudits:
        raise ValueError("gem step inputs must have equal qudit counts")
    if i == j:
        raise ValueError("gem step inputs must be distinct states")
    if abs(i.inner_product(j)) > ORTHO_TOL:
        raise ValueError("gem step inputs must be orthogonal")
    order = math.lcm(i.phase_order, j.phase_order)
    forward = i.tensor(j).promoted(order).scaled(inv_sqrt=2)
    backward = j.tensor(i).promoted(order).scaled(inv_sqrt=2)
    result = superpose([(0, forward), (0 if sign == 1 else order // 2, backward)])
    if result.norm_squared() != Fraction(1):
        raise ValueError("gem step output is not normalized")
    return result


def build_gem_sequence(levels: int) -> tuple[SparseState, SparseState]:
    """The canonical gem tower: level 1 is the Bell pair doublet, level k
    symmetrizes the two level-(k-1) siblings.  Returns (plus, minus)."""
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    if 2**levels > MAX_QUDITS:
        raise GuardExceededError(f"2**{levels} qudits exceeds {MAX_QUDITS}")
    plus, minus = build_bell_pair(+1), build_bell_pair(-1)
    for level in range(2, levels + 1):
        plus, minus = (
            build_gem_step(plus, minus, +1),
            build_gem_step(plus, minus, -1),
        )
        if len(plus.entries) > MAX_ENTRIES:
            raise GuardExceededError(f"gem level {level} exceeds {MAX_ENTRIES} entries")
        tag = Provenance("bellgem", 2, 2, level - 1)
        plus = dataclasses.replace(plus, provenance=tag)
        minus = dataclasses.replace(minus, provenance=tag)
    return plus, minus


def gem_rule(plus_sibling: SparseState, sign: int, phase_order: int = DEFAULT_PHASE_ORDER) -> ScaleRule:
    """The scale rule producing the next gem level from the minus sibling as
    predecessor, with the plus sibling supplied explicitly.

    Index 0 resolves to the plus sibling, index 1 to the predecessor; the two
    records are (0,1) and (1,0), the latter negated for ``sign == -1``.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    table: dict[int, SlotVector] = {0: NamedSlot(plus_sibling), 1: Predecessor()}
    coefficients = (
        Coefficient((0, 1)),
        Coefficient((1, 0), 0 if sign == 1 else phase_order // 2),
    )
    return ScaleRule(FractalParams(2, 2), (dict(table), dict(table)), coefficients, phase_order)


def build_bitflip_state(n: int, logical: int) -> SparseState:
    """The repetition-code register |logical> ** 3**n (c = 3, s = 1)."""
    if logical not in (0, 1):
        raise ValueError(f"logical digit must be 0 or 1, got {logical}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if 3**n > MAX_QUDITS:
        raise GuardExceededError(f"3**{n} qudits exceeds {MAX_QUDITS}")
    key = (logical,) * 3**n
    return SparseState(2, 3**n, DEFAULT_PHASE_ORDER, {key: Amplitude.one()}, Provenance("bitflip", 3, 1, n))


def build_cluster(n_qubits: int) -> SparseState:
    """The linear-chain cluster state on ``n_qubits`` qubits.

    All ``2**n`` basis strings appear with squared amplitude ``2**-n``; the
    sign of string x is ``(-1)**#{a : x_a = 0 and x_(a+1) = 1}`` with no
    factor contributed past the end of the chain.
    """
    if not 1 <= n_qubits <= 14:
        raise GuardExceededError(f"cluster size {n_qubits} outside [1, 14]")
    order = DEFAULT_PHASE_ORDER
    half = order // 2
    entries: dict[tuple[int, ...], Amplitude] = {}
    for value in range(2**n_qubits):
        bits = tuple((value >> (n_qubits - 1 - k)) & 1 for k in range(n_qubits))
        flips = sum(1 for a in range(n_qubits - 1) if bits[a] == 0 and bits[a + 1] == 1)
        entries[bits] = Amplitude((flips * half) % order, ((2, n_qubits),))
    return SparseState(2, n_qubits, order, entries, Provenance("cluster", 2, 2, None))
