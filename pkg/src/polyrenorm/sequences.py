"""Reference null sequences a_n used to scale gaps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class NullSequence:
    """Positive sequence a_1, a_2, ... tending to 0.

    ``fn`` takes a 1-based integer array; ``exact`` (optional) returns a_n as
    a Fraction for exact verification.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    exact: Callable[[int], Fraction] | None = None
    length: int | None = None

    def values(self, n_max: int) -> np.ndarray:
        if self.length is not None and n_max > self.length:
            raise ValueError(f"sequence {self.name!r} has only {self.length} values, need {n_max}")
        return np.asarray(self.fn(np.arange(1, n_max + 1)), dtype=np.float64)

    def __call__(self, n: int) -> float:
        return float(self.values(n)[-1])


HARMONIC = NullSequence("harmonic", lambda n: 1.0 / n, lambda n: Fraction(1, n))
GEOMETRIC8 = NullSequence("geometric8", lambda n: 8.0 ** -n.astype(np.float64), lambda n: Fraction(1, 8 ** n))
DYADIC = NullSequence("dyadic", lambda n: 2.0 ** -n.astype(np.float64), lambda n: Fraction(1, 2 ** n))

BUILTIN = {s.name: s for s in (HARMONIC, GEOMETRIC8, DYADIC)}


def from_values(values, name: str = "file") -> NullSequence:
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0 or (vals <= 0).any():
        raise ValueError("a sequence needs positive values")
    vals.setflags(write=False)
    return NullSequence(name, lambda n: vals[n - 1], None, int(vals.size))


def parse_sequence(text: str, name: str = "file") -> NullSequence:
    """One value per line; ``#`` comments and blank lines are ignored."""
    vals = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise ParseError(f"bad value {line!r}", lineno) from None
        if not v > 0:
            raise ParseError(f"a_n must be positive, got {line!r}", lineno)
        vals.append(v)
    if not vals:
        raise ParseError("no values", 1)
    return from_values(vals, name)


def sequence_from_id(seq_id: str) -> NullSequence:
    """``harmonic`` (1/n), ``geometric8`` (8^-n), ``dyadic`` (2^-n) or a file path."""
    if seq_id in BUILTIN:
        return BUILTIN[seq_id]
    with open(seq_id, encoding="utf-8") as fh:
        return parse_sequence(fh.read(), name=seq_id)
