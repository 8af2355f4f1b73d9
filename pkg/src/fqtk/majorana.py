"""Phased Majorana-Pauli operator strings with exact fourth-root phases.

A string is ``i**k * eta_{a1} ... eta_{aw} * (Pauli letters on qubits)`` with
the Majorana factors in strictly ascending flattened order.  Flattening
interleaves the two Majorana flavours per fermion site:

    eta(2*i)   = g_i   ("gamma",  position-like)
    eta(2*i+1) = gt_i  ("gamma tilde",  momentum-like)

so that eta_a eta_b = -eta_b eta_a for a != b and eta_a**2 = 1.  Qubit
letters commute with every Majorana factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

GAMMA = 0
GAMMA_TILDE = 1

_LETTERS = ("X", "Y", "Z")

# letter products: (left, right) -> (i-power, letter or None for identity)
_PAULI_MUL = {
    ("X", "X"): (0, None),
    ("Y", "Y"): (0, None),
    ("Z", "Z"): (0, None),
    ("X", "Y"): (1, "Z"),
    ("Y", "X"): (3, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "Y"): (3, "X"),
    ("Z", "X"): (1, "Y"),
    ("X", "Z"): (3, "Y"),
}

_PHASE_VALUES = (1 + 0j, 1j, -1 + 0j, -1j)
_PHASE_TEXT = {0: "1", 1: "i", 2: "-1", 3: "-i"}
_TEXT_PHASE = {v: k for k, v in _PHASE_TEXT.items()}


def eta_index(site: int, kind: int) -> int:
    """Flatten (site, kind) to a single Majorana index."""
    if kind not in (GAMMA, GAMMA_TILDE):
        raise ValueError(f"kind must be 0 (gamma) or 1 (gamma tilde), got {kind}")
    if site < 0:
        raise ValueError(f"site must be nonnegative, got {site}")
    return 2 * site + kind


def eta_site(eta: int) -> int:
    return eta // 2


def eta_kind(eta: int) -> int:
    return eta % 2


def _merge_etas(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Merge two ascending eta tuples.

    Returns (swap_parity, merged) where merged is ascending with repeated
    indices cancelled (eta**2 = 1) and swap_parity counts the mod-2 number of
    transpositions of distinct factors.
    """
    out: list[int] = list(a)
    parity = 0
    for y in b:
        # y must move left past every element of `out` greater than it
        greater = 0
        pos = len(out)
        while pos > 0 and out[pos - 1] > y:
            greater += 1
            pos -= 1
        parity ^= greater & 1
        if pos > 0 and out[pos - 1] == y:
            out.pop(pos - 1)  # eta**2 = 1, pair annihilates
        else:
            out.insert(pos, y)
    return parity, tuple(out)


def _mul_paulis(
    a: tuple[tuple[int, str], ...], b: tuple[tuple[int, str], ...]
) -> tuple[int, tuple[tuple[int, str], ...]]:
    """Multiply two sorted qubit-letter tuples, returning (i-power, letters)."""
    phase = 0
    left = dict(a)
    for q, letter in b:
        if q in left:
            k, prod = _PAULI_MUL[(left[q], letter)]
            phase = (phase + k) % 4
            if prod is None:
                del left[q]
            else:
                left[q] = prod
        else:
            left[q] = letter
    return phase, tuple(sorted(left.items()))


@dataclass(frozen=True)
class MajoranaQubitString:
    """A unit-phase times an ordered product of Majorana factors and Pauli letters."""

    phase_pow: int = 0
    etas: tuple[int, ...] = ()
    paulis: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        if not 0 <= self.phase_pow < 4:
            object.__setattr__(self, "phase_pow", self.phase_pow % 4)
        if any(self.etas[i] >= self.etas[i + 1] for i in range(len(self.etas) - 1)):
            raise ValueError(f"etas must be strictly ascending, got {self.etas}")
        for q, letter in self.paulis:
            if letter not in _LETTERS:
                raise ValueError(f"bad Pauli letter {letter!r} on qubit {q}")

    # -- basic structure ---------------------------------------------------

    @property
    def phase(self) -> complex:
        return _PHASE_VALUES[self.phase_pow]

    @property
    def weight(self) -> int:
        """Number of Majorana factors."""
        return len(self.etas)

    @property
    def is_fermionic(self) -> bool:
        """True when the string has odd Majorana weight."""
        return len(self.etas) % 2 == 1

    def eta_support(self) -> frozenset[int]:
        return frozenset(self.etas)

    def qubit_letters(self) -> dict[int, str]:
        return dict(self.paulis)

    def key(self) -> tuple:
        """Phase-free identity of the string (used to merge sum terms)."""
        return (self.etas, self.paulis)

    def is_identity(self) -> bool:
        return not self.etas and not self.paulis

    # -- algebra -----------------------------------------------------------

    def __mul__(self, other: "MajoranaQubitString") -> "MajoranaQubitString":
        parity, etas = _merge_etas(self.etas, other.etas)
        pphase, paulis = _mul_paulis(self.paulis, other.paulis)
        phase = (self.phase_pow + other.phase_pow + 2 * parity + pphase) % 4
        return MajoranaQubitString(phase, etas, paulis)

    def scaled(self, power: int) -> "MajoranaQubitString":
        """Multiply by i**power."""
        return MajoranaQubitString((self.phase_pow + power) % 4, self.etas, self.paulis)

    def adjoint(self) -> "MajoranaQubitString":
        w = len(self.etas)
        # reversing w anticommuting factors costs (-1)**(w*(w-1)/2) = i**(w*(w-1))
        phase = (-self.phase_pow + w * (w - 1)) % 4
        return MajoranaQubitString(phase, self.etas, self.paulis)

    def is_hermitian(self) -> bool:
        return self.adjoint() == self

    def commutes_with(self, other: "MajoranaQubitString") -> bool:
        return commutation_class(self, other) == "commutes"

    # -- text form ---------------------------------------------------------

    def __str__(self) -> str:
        factors = " ".join(
            ("g" if eta_kind(e) == GAMMA else "gt") + str(eta_site(e)) for e in self.etas
        )
        letters = " ".join(f"{letter}:q{q}" for q, letter in self.paulis)
        head = _PHASE_TEXT[self.phase_pow]
        if not factors and not letters:
            return head
        body = factors
        if letters:
            body = f"{body} | {letters}" if body else f"| {letters}"
        return f"{head} * {body}"

    @classmethod
    def from_text(cls, text: str) -> "MajoranaQubitString":
        text = text.strip()
        if "*" not in text:
            return cls(_TEXT_PHASE[text], (), ())
        head, _, body = text.partition("*")
        phase = _TEXT_PHASE[head.strip()]
        maj_part, _, pauli_part = body.partition("|")
        factors = []
        for tok in maj_part.split():
            kind = GAMMA_TILDE if tok.startswith("gt") else GAMMA
            site = int(tok[2:] if kind == GAMMA_TILDE else tok[1:])
            factors.append(eta_index(site, kind))
        paulis = []
        for tok in pauli_part.split():
            letter, _, q = tok.partition(":q")
            paulis.append((int(q), letter))
        return canonicalize(factors, phase_pow=phase, paulis=paulis)


# -- constructors ------------------------------------------------------------


def identity_string() -> MajoranaQubitString:
    return MajoranaQubitString()


def g(site: int) -> MajoranaQubitString:
    return MajoranaQubitString(0, (eta_index(site, GAMMA),), ())


def gt(site: int) -> MajoranaQubitString:
    return MajoranaQubitString(0, (eta_index(site, GAMMA_TILDE),), ())


def pauli(letter: str, qubit: int) -> MajoranaQubitString:
    return MajoranaQubitString(0, (), ((qubit, letter),))


def zf_string(site: int) -> MajoranaQubitString:
    """The parity factor (1 - 2 n_i) = -i gt_i g_i as a canonical string."""
    return canonicalize([eta_index(site, GAMMA_TILDE), eta_index(site, GAMMA)], phase_pow=3)


def canonicalize(
    factors: Iterable[int],
    phase_pow: int = 0,
    paulis: Iterable[tuple[int, str]] | Mapping[int, str] = (),
) -> MajoranaQubitString:
    """Order an arbitrary eta factor list into canonical ascending form.

    Each transposition of distinct indices contributes a sign and repeated
    indices cancel pairwise.  Pauli letters on the same qubit are multiplied
    left to right.
    """
    s = MajoranaQubitString(phase_pow % 4, (), ())
    for f in factors:
        s = s * MajoranaQubitString(0, (int(f),), ())
    items = paulis.items() if isinstance(paulis, Mapping) else paulis
    for q, letter in items:
        s = s * MajoranaQubitString(0, (), ((int(q), letter),))
    return s


def commutation_class(a: MajoranaQubitString, b: MajoranaQubitString) -> str:
    """Classify a pair of canonical strings as "commutes" or "anticommutes".

    O_a O_b = (-1)**(|A|*|B| + |A n B|) O_b O_a for the Majorana supports,
    combined multiplicatively with letter-wise qubit anticommutations.
    """
    sa, sb = a.eta_support(), b.eta_support()
    exponent = len(sa) * len(sb) + len(sa & sb)
    letters_b = dict(b.paulis)
    for q, letter in a.paulis:
        other = letters_b.get(q)
        if other is not None and other != letter:
            exponent += 1
    return "commutes" if exponent % 2 == 0 else "anticommutes"


# -- Pauli strings and the Jordan-Wigner map ---------------------------------


@dataclass(frozen=True)
class PauliString:
    """A unit-phase Pauli operator on a qubit register."""

    phase_pow: int = 0
    letters: tuple[tuple[int, str], ...] = ()

    @property
    def phase(self) -> complex:
        return _PHASE_VALUES[self.phase_pow % 4]

    def __mul__(self, other: "PauliString") -> "PauliString":
        k, letters = _mul_paulis(self.letters, other.letters)
        return PauliString((self.phase_pow + other.phase_pow + k) % 4, letters)

    def is_hermitian(self) -> bool:
        return self.phase_pow % 2 == 0

    def __str__(self) -> str:
        body = " ".join(f"{letter}:q{q}" for q, letter in self.letters)
        return f"{_PHASE_TEXT[self.phase_pow % 4]} * {body}" if body else _PHASE_TEXT[self.phase_pow % 4]


def jordan_wigner(s: MajoranaQubitString, n_fermion_modes: int, n_qubits: int = 0) -> PauliString:
    """Map a Majorana-qubit string to a Pauli string on a combined register.

    Convention: g_i -> (prod_{j<i} Z_j) X_i and gt_i -> (prod_{j<i} Z_j) Y_i
    on the fermion-slot qubits, which sit after the native qubits in the
    combined index space (native qubit q -> q, fermion mode i -> n_qubits + i).
    """
    result = PauliString(s.phase_pow, tuple((q, letter) for q, letter in s.paulis))
    for e in s.etas:
        site, kind = eta_site(e), eta_kind(e)
        if site >= n_fermion_modes:
            raise ValueError(f"fermion site {site} outside register of {n_fermion_modes} modes")
        letters = [(n_qubits + j, "Z") for j in range(site)]
        letters.append((n_qubits + site, "X" if kind == GAMMA else "Y"))
        result = result * PauliString(0, tuple(letters))
    return result


# -- operator sums ------------------------------------------------------------


class OperatorSum:
    """A complex-linear combination of canonical strings with merged terms."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[complex, MajoranaQubitString]] = (), tol: float = 0.0):
        merged: dict[tuple, tuple[complex, MajoranaQubitString]] = {}
        for coeff, s in terms:
            c = complex(coeff) * s.phase
            bare = MajoranaQubitString(0, s.etas, s.paulis)
            key = bare.key()
            if key in merged:
                c = merged[key][0] + c
            merged[key] = (c, bare)
        self._terms = tuple(
            (c, s) for c, s in sorted(merged.values(), key=lambda t: (len(t[1].etas), t[1].key()))
            if abs(c) > tol
        )

    @classmethod
    def from_string(cls, s: MajoranaQubitString, coeff: complex = 1.0) -> "OperatorSum":
        return cls([(coeff, s)])

    @property
    def terms(self) -> tuple[tuple[complex, MajoranaQubitString], ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        return OperatorSum(list(self._terms) + list(other._terms), tol=1e-14)

    def __mul__(self, other: "OperatorSum") -> "OperatorSum":
        prods = []
        for ca, sa in self._terms:
            for cb, sb in other._terms:
                prods.append((ca * cb, sa * sb))
        return OperatorSum(prods, tol=1e-14)

    def scaled(self, coeff: complex) -> "OperatorSum":
        return OperatorSum([(coeff * c, s) for c, s in self._terms])

    def adjoint(self) -> "OperatorSum":
        return OperatorSum([(c.conjugate(), s.adjoint()) for c, s in self._terms])

    def single(self) -> tuple[complex, MajoranaQubitString]:
        if len(self._terms) != 1:
            raise ValueError(f"expected a single-term sum, got {len(self._terms)} terms")
        return self._terms[0]

    def single_string(self) -> MajoranaQubitString:
        """Collapse a one-term sum with fourth-root coefficient back to a string."""
        c, s = self.single()
        for k, val in enumerate(_PHASE_VALUES):
            if abs(c - val) < 1e-12:
                return s.scaled(k)
        raise ValueError(f"coefficient {c} is not a fourth root of unity")

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({c:.6g}) {s}" for c, s in self._terms)
