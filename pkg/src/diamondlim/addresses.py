"""Symbolic addresses on the diamond-graph tower.

Level n of the tower is a metric graph with 6^n edges, each of length 4^-n,
obtained from a single unit segment by n rounds of quarter-subdivision: every
edge is cut into four equal parts and the two middle quarters are doubled into
parallel "top" and "bottom" branches.  An edge of level n is named by a word
of n digits from {1..6}:

    1  first quarter          2  top copy, 2nd quarter     3  top copy, 3rd quarter
    6  last quarter           4  bottom copy, 2nd quarter  5  bottom copy, 3rd quarter

Every edge is oriented away from the left endpoint of the original segment:
child 1 starts at the parent's start, children 2,3 (top) and 4,5 (bottom) run
left to right, child 6 ends at the parent's end.  A point is an edge word
plus an exact arclength offset along that orientation, kept as a Fraction so
collapsing maps and distances never suffer float drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

DIGITS = "123456"

# Start of each child inside its parent, in quarter-edge units.  Top and
# bottom copies of a doubled quarter collapse to the same parent segment.
BASE_QUARTER = {1: 0, 2: 1, 3: 2, 4: 1, 5: 2, 6: 3}


def edge_length(level: int) -> Fraction:
    """Common length of every level-`level` edge."""
    return Fraction(1, 4**level)


def validate_word(word: str) -> str:
    """Check that `word` is a string over {1..6}; return it unchanged."""
    if not isinstance(word, str):
        raise TypeError(f"edge word must be a digit string, got {type(word).__name__}")
    for ch in word:
        if ch not in DIGITS:
            raise ValueError(f"invalid edge word {word!r}: digit {ch!r} not in 1..6")
    return word


def child_edges(word: str) -> list[str]:
    """The six next-level edges that collapse onto `word`, in label order."""
    validate_word(word)
    return [word + d for d in DIGITS]


def truncate(word: str, k: int) -> str:
    """First k digits: the level-k edge whose preimage contains `word`."""
    validate_word(word)
    if not 0 <= k <= len(word):
        raise ValueError(f"cannot truncate a level-{len(word)} word to level {k}")
    return word[:k]


def word_at(level: int, index: int) -> str:
    """Edge word for position `index` in the lexicographic level enumeration."""
    if not 0 <= index < 6**level:
        raise ValueError(f"edge index {index} out of range at level {level}")
    digits = []
    for _ in range(level):
        index, d = divmod(index, 6)
        digits.append(DIGITS[d])
    return "".join(reversed(digits))


def index_of(word: str) -> int:
    """Inverse of :func:`word_at`."""
    validate_word(word)
    i = 0
    for ch in word:
        i = 6 * i + (int(ch) - 1)
    return i


@dataclass(frozen=True)
class PointAddress:
    """A point of the level-n graph: containing edge word + exact offset.

    `offset` runs over [0, 4^-n] along the edge orientation; the endpoints
    0 and 4^-n are the edge's start and end vertices.
    """

    word: str
    offset: Fraction

    def __post_init__(self):
        validate_word(self.word)
        off = self.offset
        if not isinstance(off, Fraction):
            off = Fraction(off)
            object.__setattr__(self, "offset", off)
        if not 0 <= off <= edge_length(len(self.word)):
            raise ValueError(
                f"offset {off} outside [0, {edge_length(len(self.word))}] "
                f"on a level-{len(self.word)} edge"
            )

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def edge_len(self) -> Fraction:
        return edge_length(self.level)

    @classmethod
    def midpoint(cls, word: str) -> "PointAddress":
        return cls(word, edge_length(len(word)) / 2)

    def to_json(self) -> dict:
        return {"word": self.word, "offset": format_fraction(self.offset)}

    @classmethod
    def from_json(cls, data: dict) -> "PointAddress":
        return cls(data["word"], Fraction(data["offset"]))


def format_fraction(x: Fraction) -> str:
    """Serialize an exact offset as "num/den"."""
    return f"{x.numerator}/{x.denominator}"


def project_point(p: PointAddress, k: int) -> PointAddress:
    """Image of `p` under the collapsing map from its level down to level k.

    One collapse step sends (word+d, t) to (word, base(d)*4^-(m+1) + t):
    the child edge sits base(d) quarters into its parent, and top/bottom
    copies land on the same quarter.
    """
    if not 0 <= k <= p.level:
        raise ValueError(f"cannot project a level-{p.level} point to level {k}")
    word, off = p.word, p.offset
    for lvl in range(p.level, k, -1):
        off = BASE_QUARTER[int(word[-1])] * edge_length(lvl) + off
        word = word[:-1]
    return PointAddress(word, off)


def chart_coordinate(p: PointAddress) -> Fraction:
    """Position in [0,1] after collapsing all the way to the base segment.

    Equals sum(base(digit_m) * 4^-m) plus the residual offset; the map
    factors through every intermediate level.
    """
    return project_point(p, 0).offset


def point_from_cantor(digits: Sequence[int] | Iterable[int]) -> PointAddress:
    """Finite-level stand-in for the point coded by a digit sequence.

    The length-N prefix pins down a level-N edge; the midpoint convention
    picks a representative point on it (the limit point is never built).
    """
    word = "".join(str(int(d)) for d in digits)
    validate_word(word)
    return PointAddress.midpoint(word)


def is_vertex_point(p: PointAddress) -> bool:
    """True iff `p` sits on a vertex of its level graph."""
    return p.offset == 0 or p.offset == p.edge_len
