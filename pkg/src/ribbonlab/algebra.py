"""Exact scalars, Koszul signs, graded formal sums and truncation windows.

Everything downstream works over Q with exact arithmetic; a single rounding
error would invalidate the d^2 = 0 style checks, so floats never appear.
Scalars are `fractions.Fraction`.  Degrees are plain integers; sign rules
only ever consume parities (degree mod 2), which is what `koszul_sign`
and the transport helpers operate on.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Degree:
    """An integer degree, optionally compared only modulo 2."""

    value: int
    mod2: bool = False

    @property
    def parity(self) -> int:
        return self.value & 1

    def same(self, other: "Degree") -> bool:
        if self.mod2 or other.mod2:
            return self.parity == other.parity
        return self.value == other.value


def parity_of(deg) -> int:
    if isinstance(deg, Degree):
        return deg.parity
    return int(deg) & 1


def koszul_sign(perm: Iterable[int], degrees) -> int:
    """Sign acquired when reordering graded objects by `perm`.

    `perm[i]` is the source position (0-based) of the object landing in slot
    i, so `perm` is a bijection on range(n).  The sign is -1 to the number of
    inversions both of whose objects have odd degree.
    """
    perm = list(perm)
    pars = [parity_of(d) for d in degrees]
    if len(perm) != len(pars):
        raise ValueError("permutation and degree list have different lengths")
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("not a permutation of range(n)")
    sign = 1
    for i in range(len(perm)):
        if not pars[perm[i]]:
            continue
        for j in range(i + 1, len(perm)):
            if perm[j] < perm[i] and pars[perm[j]]:
                sign = -sign
    return sign


def transport_sign(parity_moved: int, parities_passed: Iterable[int]) -> int:
    """Sign for moving one object of given parity past a block of others."""
    if parity_moved & 1 == 0:
        return 1
    return -1 if (sum(p & 1 for p in parities_passed) & 1) else 1


def sort_with_sign(items, parities, key=None):
    """Stable-sort `items`, returning (sorted items, Koszul sign).

    `parities[i]` is the parity of items[i]; returns sign 0 if two equal
    items of odd parity collide (they square to zero in a symmetric word).
    """
    idx = sorted(range(len(items)), key=(lambda i: items[i]) if key is None else (lambda i: key(items[i])))
    sign = koszul_sign(idx, parities)
    out = [items[i] for i in idx]
    for a, b in zip(idx, idx[1:]):
        if items[a] == items[b] and (parities[a] & 1) and (parities[b] & 1):
            return out, 0
    return out, sign


class FormalSum:
    """Finite linear combination of hashable basis keys with Fraction coefficients.

    Zero coefficients are never stored.  Keys are canonical basis symbols;
    whoever owns the key type is responsible for canonicalising before
    insertion.
    """

    __slots__ = ("t",)

    def __init__(self, terms: Mapping | Iterable | None = None):
        self.t: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for k, c in items:
                self.add_term(k, c)

    def add_term(self, key, coeff) -> None:
        c = self.t.get(key, ZERO) + coeff
        if c:
            self.t[key] = c
        else:
            self.t.pop(key, None)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(dict(self.t))
        for k, c in other.t.items():
            out.add_term(k, c)
        return out

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(dict(self.t))
        for k, c in other.t.items():
            out.add_term(k, -c)
        return out

    def __neg__(self) -> "FormalSum":
        return FormalSum({k: -c for k, c in self.t.items()})

    def scale(self, c) -> "FormalSum":
        if not c:
            return FormalSum()
        return FormalSum({k: v * c for k, v in self.t.items()})

    def map_terms(self, fn) -> "FormalSum":
        """Apply fn(key, coeff) -> FormalSum and sum the results."""
        out = FormalSum()
        for k, c in self.t.items():
            piece = fn(k, c)
            if piece is not None:
                for k2, c2 in piece.t.items():
                    out.add_term(k2, c2)
        return out

    def filter(self, pred) -> "FormalSum":
        return FormalSum({k: c for k, c in self.t.items() if pred(k)})

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSum) and self.t == other.t

    def __hash__(self):
        raise TypeError("FormalSum is mutable, not hashable")

    def is_zero(self) -> bool:
        return not self.t

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self):
        return iter(sorted(self.t.items(), key=lambda kv: repr(kv[0])))

    def __repr__(self) -> str:
        if not self.t:
            return "0"
        bits = []
        for k, c in sorted(self.t.items(), key=lambda kv: repr(kv[0])):
            bits.append(f"({c})*{k!r}")
        return " + ".join(bits)


@dataclass(frozen=True)
class TruncationProfile:
    """Finite window in which every formal series is evaluated.

    All bounds are inclusive.  `max_genus_defect` bounds the total vertex
    defect of a graph: the sum of loop defects o(v) for stable graphs and of
    2 g(v) + sum_b b(v) + c(v) - 1 for stable ribbon graphs, which is the
    loop defect of the underlying stable graph.
    """

    max_edges: int = 0
    max_leaves: int = 0
    max_genus_defect: int = 0
    max_word_length: int = 0
    max_sym_length: int = 0
    max_hbar_power: int = 0
    max_gamma_power: int = 0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def shrink(self, **deltas) -> "TruncationProfile":
        """Return a profile with the given bounds lowered (floored at 0)."""
        updates = {k: max(0, getattr(self, k) - d) for k, d in deltas.items()}
        return replace(self, **updates)
