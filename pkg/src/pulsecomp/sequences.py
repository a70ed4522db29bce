"""Compensation-sequence builders and the memoizing sequence compiler.

Temporal convention: a sequence's item order is time order, and the
compiled product puts later pulses on the left (U = U_k ... U_1).  Every
builder emits its main rotation first and the correction pulses after it;
the compiled correction block multiplies the main rotation from the left,
which carries the same infidelity as the textbook right-multiplied form
because AB and BA share a spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .pauli import Hamiltonian, unit_su2_partner
from .unitary import Unitary, distance, evolve


class SequenceError(ValueError):
    """Invalid builder inputs (non-closing pair, bad angle, bad label)."""


class CompileError(ValueError):
    """Missing or inconsistent error assignments at compile time."""


@dataclass(frozen=True)
class Pulse:
    """Simultaneous application of labeled Hamiltonian terms.

    Each term is (label, theta, hamiltonian); the systematic error of the
    label multiplies theta at compile time.
    """

    terms: tuple[tuple[str, float, Hamiltonian], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise SequenceError("empty pulse")
        sizes = {h.n_qubits for _, _, h in self.terms}
        if len(sizes) > 1:
            raise SequenceError(f"mixed qubit counts in pulse: {sorted(sizes)}")
        for _, theta, _ in self.terms:
            if not math.isfinite(theta):
                raise SequenceError("non-finite pulse angle")

    @property
    def n_qubits(self) -> int:
        return self.terms[0][2].n_qubits

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(label for label, _, _ in self.terms)

    def inverse(self) -> "Pulse":
        return Pulse(tuple((l, -theta, h) for l, theta, h in self.terms))

    @classmethod
    def single(cls, label: str, theta: float, h: Hamiltonian) -> "Pulse":
        return cls(((label, theta, h),))


Item = Union[Pulse, "PulseSequence"]


@dataclass(frozen=True)
class PulseSequence:
    """An ordered list of pulses; nested blocks memoize as units.

    ``items`` may mix pulses and sub-sequences (corrected blocks); the
    flattened pulse list is exposed as ``pulses``.  ``required_groups``
    lists label sets whose errors must resolve to one value at compile
    time.
    """

    items: tuple[Item, ...]
    required_groups: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        if not self.items:
            raise SequenceError("empty pulse sequence")
        sizes = {it.n_qubits for it in self.items}
        if len(sizes) > 1:
            raise SequenceError(f"mixed qubit counts in sequence: {sorted(sizes)}")

    @property
    def n_qubits(self) -> int:
        return self.items[0].n_qubits

    @cached_property
    def pulses(self) -> tuple[Pulse, ...]:
        out: list[Pulse] = []
        for it in self.items:
            if isinstance(it, Pulse):
                out.append(it)
            else:
                out.extend(it.pulses)
        return tuple(out)

    @cached_property
    def labels(self) -> frozenset[str]:
        out: set[str] = set()
        for it in self.items:
            out |= it.labels
        return frozenset(out)

    def inverse(self) -> "PulseSequence":
        return PulseSequence(
            tuple(it.inverse() for it in reversed(self.items)),
            required_groups=self.required_groups,
        )

    def dump(self) -> str:
        """One pulse per line: ``label theta hamiltonian-expression``."""
        lines = []
        for p in self.pulses:
            parts = [f"{l} {theta:.17g} {h}" for l, theta, h in p.terms]
            lines.append(" ; ".join(parts))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ErrorAssignment:
    """Map from control label to systematic error, with shared groups.

    Labels in one group share a single value; supplying conflicting values
    for grouped labels is rejected.  ``seed`` and ``signs`` record how a
    random-sign assignment was drawn.
    """

    values: Mapping[str, float]
    groups: tuple[frozenset[str], ...] = ()
    seed: Optional[int] = None
    signs: str = ""

    def __post_init__(self) -> None:
        resolved = dict(self.values)
        for group in self.groups:
            assigned = {resolved[l] for l in group if l in resolved}
            if len(assigned) > 1:
                raise CompileError(
                    f"group {sorted(group)} has conflicting errors {sorted(assigned)}"
                )
            if assigned:
                val = assigned.pop()
                for l in group:
                    resolved[l] = val
        object.__setattr__(self, "values", resolved)

    def resolve(self, label: str) -> float:
        try:
            return self.values[label]
        except KeyError:
            raise CompileError(f"no error assigned to label {label!r}") from None

    def has(self, label: str) -> bool:
        return label in self.values

    @classmethod
    def zero(cls, labels) -> "ErrorAssignment":
        return cls({l: 0.0 for l in labels})

    @classmethod
    def uniform(cls, labels, eps: float) -> "ErrorAssignment":
        return cls({l: eps for l in labels})


class CompileCache:
    """Memo for compiled pulses and nested blocks, keyed by structure + errors."""

    def __init__(self) -> None:
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)

    def get(self, key):
        hit = self._store.get(key)
        if hit is None:
            self.misses += 1
        else:
            self.hits += 1
        return hit

    def put(self, key, value) -> None:
        self._store[key] = value


def _pulse_matrix(p: Pulse, errors: ErrorAssignment) -> np.ndarray:
    return evolve(
        [(theta, errors.resolve(l), h) for l, theta, h in p.terms]
    ).matrix


def _item_matrix(item: Item, errors: ErrorAssignment, cache: Optional[CompileCache]) -> np.ndarray:
    if cache is not None:
        if isinstance(item, Pulse):
            key = (item, tuple(errors.resolve(l) for l, _, _ in item.terms))
        else:
            key = (item, tuple(errors.resolve(l) for l in sorted(item.labels)))
        hit = cache.get(key)
        if hit is not None:
            return hit
    if isinstance(item, Pulse):
        mat = _pulse_matrix(item, errors)
    else:
        mat = np.eye(2**item.n_qubits, dtype=complex)
        for sub in item.items:
            mat = _item_matrix(sub, errors, cache) @ mat
    if cache is not None:
        cache.put(key, mat)
    return mat


def compile_sequence(
    seq: PulseSequence,
    errors: ErrorAssignment,
    cache: Optional[CompileCache] = None,
) -> Unitary:
    """Compile a sequence to a unitary; later pulses multiply on the left."""
    missing = sorted(l for l in seq.labels if not errors.has(l))
    if missing:
        raise CompileError(f"unassigned labels: {', '.join(missing)}")
    for group in seq.required_groups:
        vals = {errors.resolve(l) for l in group}
        if len(vals) > 1:
            raise CompileError(
                f"labels {sorted(group)} must share one error, got {sorted(vals)}"
            )
    return Unitary(_item_matrix(seq, errors, cache))


def phi_of(theta: float) -> float:
    """Correction-pulse angle acos(-theta / 4 pi)."""
    x = -theta / (4.0 * math.pi)
    if abs(x) > 1.0:
        raise SequenceError(f"|theta| = {abs(theta):g} exceeds 4*pi")
    return math.acos(x)


def _w_correction_items(
    phi: float, h1: Hamiltonian, h2: Hamiltonian, l1: str, l2: str
) -> tuple[Pulse, Pulse, Pulse]:
    def tilted(scale: float, angle: float) -> Pulse:
        return Pulse(
            (
                (l1, scale * math.cos(angle), h1),
                (l2, scale * math.sin(angle), h2),
            )
        )

    outer = tilted(math.pi, phi)
    return (outer, tilted(2.0 * math.pi, 3.0 * phi), outer)


def w_correction(
    phi: float, h1: Hamiltonian, h2: Hamiltonian, l1: str, l2: str
) -> PulseSequence:
    """The three simultaneous correction pulses alone (no main rotation)."""
    return PulseSequence(_w_correction_items(phi, h1, h2, l1, l2))


def _bb1_w_unchecked(
    theta: float, h1: Hamiltonian, h2: Hamiltonian, l1: str, l2: str
) -> PulseSequence:
    phi = phi_of(theta)
    main = Pulse.single(l1, theta, h1)
    return PulseSequence((main, *_w_correction_items(phi, h1, h2, l1, l2)))


def bb1_w(
    theta: float, h1: Hamiltonian, h2: Hamiltonian, l1: str, l2: str
) -> PulseSequence:
    """Four-pulse broadband sequence using simultaneous tilted-axis pulses.

    Requires the pair to close as su(2) with unit structure constants, so
    each simultaneous pulse is a rotation and the pi/2pi/pi correction
    collapses to the identity at zero error.  Compensates a shared
    (correlated) error on both controls to second order.
    """
    if unit_su2_partner(h1, h2) is None:
        raise SequenceError(
            f"({h1}) and ({h2}) do not close as su(2) with unit structure "
            "constants; simultaneous correction pulses would not be rotations"
        )
    return _bb1_w_unchecked(theta, h1, h2, l1, l2)


def bb1_j(
    theta: float, h1: Hamiltonian, h2: Hamiltonian, l1: str, l2: str
) -> PulseSequence:
    """Ten-pulse conjugation-based sequence using only the two controls.

    Tilted axes are produced by conjugating H1 pulses with H2 rotations.
    Exact for any H2 error when the H1 error vanishes; compensates the H1
    error to second order when H2 is error free.
    """
    if unit_su2_partner(h1, h2) is None:
        raise SequenceError(
            f"({h1}) and ({h2}) do not close as su(2) with unit structure "
            "constants; conjugation would not tilt the rotation axis"
        )
    phi = phi_of(theta)

    def block(scale: float, tilt: float) -> tuple[Pulse, ...]:
        return (
            Pulse.single(l2, -tilt, h2),
            Pulse.single(l1, scale * math.pi, h1),
            Pulse.single(l2, tilt, h2),
        )

    return PulseSequence(
        (
            Pulse.single(l1, theta, h1),
            *block(1.0, phi),
            *block(2.0, 3.0 * phi),
            *block(1.0, phi),
        )
    )


def substitute(
    seq: PulseSequence,
    label: str,
    builder: Callable[[float], PulseSequence],
    check_tol: float = 1e-10,
) -> PulseSequence:
    """Replace every pulse carrying ``label`` by a corrected block.

    The builder maps a target angle to a replacement sequence; pulses with
    negative angles receive the reversed, angle-negated block.  Each
    distinct angle's replacement is verified once against the pulse's
    ideal action at zero error (up to global phase).
    """
    checked: dict[float, PulseSequence] = {}
    groups: list[frozenset[str]] = list(seq.required_groups)

    def replacement(pulse: Pulse) -> PulseSequence:
        (_, theta, h) = pulse.terms[0]
        mag = abs(theta)
        if mag not in checked:
            block = builder(mag)
            ideal = compile_sequence(block, ErrorAssignment.zero(block.labels))
            target = evolve([(mag, 0.0, h)])
            mismatch = distance(target, ideal, align_phase=True)
            if mismatch > check_tol:
                raise SequenceError(
                    f"replacement for {label!r} at angle {mag:g} deviates from "
                    f"the ideal pulse by {mismatch:.3e}"
                )
            checked[mag] = block
            for g in block.required_groups:
                if g not in groups:
                    groups.append(g)
        block = checked[mag]
        return block if theta >= 0 else block.inverse()

    def walk(item: Item) -> Item:
        if isinstance(item, Pulse):
            if label not in item.labels:
                return item
            if len(item.terms) > 1:
                raise SequenceError(
                    f"label {label!r} appears in a simultaneous pulse; only "
                    "single-term pulses can be substituted"
                )
            return replacement(item)
        return PulseSequence(
            tuple(walk(sub) for sub in item.items),
            required_groups=item.required_groups,
        )

    out = PulseSequence(tuple(walk(it) for it in seq.items))
    return PulseSequence(out.items, required_groups=tuple(groups))


def bb1_wj(
    theta: float,
    h1: Hamiltonian,
    h2: Hamiltonian,
    h4: Hamiltonian,
    l1: str,
    l2: str,
    l4: str,
) -> PulseSequence:
    """BB1-J skeleton whose six tilt pulses are corrected blocks.

    Each H2 tilt pulse of the conjugation sequence is replaced by the
    four-pulse simultaneous sequence built from H2 and H4 (inverse tilts
    get the reversed, negated block), correcting the correlated H2/H4
    error before the independent H1 error.  The labels l2 and l4 must
    resolve to one shared error at compile time.
    """
    skeleton = bb1_j(theta, h1, h2, l1, l2)
    out = substitute(skeleton, l2, lambda x: bb1_w(x, h2, h4, l2, l4))
    groups = out.required_groups
    pair = frozenset({l2, l4})
    if pair not in groups:
        groups = (*groups, pair)
    return PulseSequence(out.items, required_groups=groups)


def _chain_hamiltonians(n: int):
    def word(positions: dict[int, str]) -> str:
        return "".join(positions.get(k, "I") for k in range(1, n + 1))

    hx = {j: Hamiltonian.single(0.5, word({j: "X"})) for j in range(1, n + 1)}
    hy = {j: Hamiltonian.single(0.5, word({j: "Y"})) for j in range(1, n + 1)}
    hzz = {
        j: Hamiltonian.single(0.5, word({j: "Z", j + 1: "Z"}))
        for j in range(1, n)
    }
    return hx, hy, hzz


def chain_labels(n: int) -> list[str]:
    """Control labels used by the n-qubit chain: X_j, Y_1 and Z_jZ_{j+1}."""
    labels = [f"X{j}" for j in range(1, n + 1)]
    labels.append("Y1")
    labels.extend(f"ZZ{j}{j + 1}" for j in range(1, n))
    return labels


def wj_chain(n: int, theta: float) -> PulseSequence:
    """Corrected X rotation on qubit n of an Ising chain.

    Level 0 corrects X_1 with the simultaneous (X_1, Y_1) sequence; each
    further level is a conjugation sequence whose tilt pulses are the
    previous level's corrected block, alternating Z_jZ_{j+1} and X_{j+1}
    until X_n.  Pulse count follows L_k = 4 + 6 L_{k-1} over 2(n-1)
    levels.
    """
    if n < 1:
        raise SequenceError(f"chain length must be >= 1, got {n}")
    hx, hy, hzz = _chain_hamiltonians(max(n, 1))

    def corrected_x1(x: float) -> PulseSequence:
        return bb1_w(x, hx[1], hy[1], "X1", "Y1")

    builder = corrected_x1
    for j in range(1, n):
        prev = builder

        def corrected_zz(x: float, j=j, prev=prev) -> PulseSequence:
            seq = bb1_j(x, hzz[j], hx[j], f"ZZ{j}{j + 1}", f"X{j}")
            return substitute(seq, f"X{j}", prev)

        def corrected_x(x: float, j=j, czz=corrected_zz) -> PulseSequence:
            seq = bb1_j(x, hx[j + 1], hzz[j], f"X{j + 1}", f"ZZ{j}{j + 1}")
            return substitute(seq, f"ZZ{j}{j + 1}", czz)

        builder = corrected_x
    return builder(theta)
