"""Board geometry and movement rules for king-rook-vs-king positions.

Positions hold a white king, a white rook and a black king. The only
legality rules that matter are piece distinctness, king non-adjacency,
rook line attacks (the white king is the only possible blocker) and the
usual "the side not to move may not be in check" convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

FILES = "abcdefgh"


class Side(Enum):
    WHITE = "white"
    BLACK = "black"


class Piece(Enum):
    KING = "king"
    ROOK = "rook"


class IllegalPositionError(ValueError):
    """Raised when three squares plus a side do not form a legal position."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True, order=True)
class Square:
    file: int  # 1..8, rendered a..h
    rank: int  # 1..8

    def __post_init__(self):
        if not (1 <= self.file <= 8 and 1 <= self.rank <= 8):
            raise ValueError(f"square off the board: file={self.file} rank={self.rank}")

    @classmethod
    def from_text(cls, text: str) -> "Square":
        """Parse "a1".."h8" (lowercase file letter + rank digit)."""
        if len(text) != 2 or text[0] not in FILES or not text[1].isdigit():
            raise ValueError(f"bad square notation: {text!r}")
        return cls(FILES.index(text[0]) + 1, int(text[1]))

    @property
    def index(self) -> int:
        """Dense 0..63 index (file-minor, rank-major)."""
        return (self.rank - 1) * 8 + (self.file - 1)

    @classmethod
    def from_index(cls, index: int) -> "Square":
        return cls(index % 8 + 1, index // 8 + 1)

    def __str__(self) -> str:
        return f"{FILES[self.file - 1]}{self.rank}"


def is_adjacent(a: Square, b: Square) -> bool:
    """King-step adjacency: Chebyshev distance exactly 1."""
    return max(abs(a.file - b.file), abs(a.rank - b.rank)) == 1


def rook_attacks(wr: Square, wk: Square, target: Square) -> bool:
    """Does a rook on `wr` attack `target`, with the white king on `wk` as
    the only potential blocker?  A square strictly between counts as a block."""
    if wr == target:
        raise ValueError("rook does not attack its own square")
    if wr.file == target.file:
        lo, hi = sorted((wr.rank, target.rank))
        return not (wk.file == wr.file and lo < wk.rank < hi)
    if wr.rank == target.rank:
        lo, hi = sorted((wr.file, target.file))
        return not (wk.rank == wr.rank and lo < wk.file < hi)
    return False


def validate_position(wk: Square, wr: Square, bk: Square, side_to_move: Side) -> str | None:
    """Return a violated-rule description, or None if the position is legal."""
    if wk == wr or wk == bk or wr == bk:
        return "pieces overlap"
    if is_adjacent(wk, bk):
        return "kings adjacent"
    if side_to_move is Side.WHITE and rook_attacks(wr, wk, bk):
        return "black in check with white to move"
    return None


@dataclass(frozen=True)
class Position:
    wk: Square
    wr: Square
    bk: Square
    side_to_move: Side

    def __post_init__(self):
        reason = validate_position(self.wk, self.wr, self.bk, self.side_to_move)
        if reason is not None:
            raise IllegalPositionError(reason)

    def __str__(self) -> str:
        tag = "w" if self.side_to_move is Side.WHITE else "b"
        return f"K{self.wk} R{self.wr} k{self.bk} {tag}"


# The eight elements of the square-board symmetry group, as (file, rank)
# maps on 1..8 coordinates.
_TRANSFORM_MAPS = {
    "identity": lambda f, r: (f, r),
    "rot90": lambda f, r: (r, 9 - f),
    "rot180": lambda f, r: (9 - f, 9 - r),
    "rot270": lambda f, r: (9 - r, f),
    "mirror_file": lambda f, r: (9 - f, r),
    "mirror_rank": lambda f, r: (f, 9 - r),
    "mirror_diag": lambda f, r: (r, f),
    "mirror_antidiag": lambda f, r: (9 - r, 9 - f),
}


class SymmetryTransform(Enum):
    IDENTITY = "identity"
    ROT90 = "rot90"
    ROT180 = "rot180"
    ROT270 = "rot270"
    MIRROR_FILE = "mirror_file"
    MIRROR_RANK = "mirror_rank"
    MIRROR_DIAG = "mirror_diag"
    MIRROR_ANTIDIAG = "mirror_antidiag"

    def apply(self, sq: Square) -> Square:
        f, r = _TRANSFORM_MAPS[self.value](sq.file, sq.rank)
        return Square(f, r)

    def apply_position(self, p: Position) -> Position:
        return Position(self.apply(p.wk), self.apply(p.wr), self.apply(p.bk), p.side_to_move)

    @property
    def inverse(self) -> "SymmetryTransform":
        if self is SymmetryTransform.ROT90:
            return SymmetryTransform.ROT270
        if self is SymmetryTransform.ROT270:
            return SymmetryTransform.ROT90
        return self  # rotations by 180 and all reflections are involutions

    def compose(self, other: "SymmetryTransform") -> "SymmetryTransform":
        """The transform equivalent to applying `other` first, then self."""
        probe = [Square(2, 1), Square(1, 3)]  # two squares pin down the group element
        images = [self.apply(other.apply(s)) for s in probe]
        for t in SymmetryTransform:
            if [t.apply(s) for s in probe] == images:
                return t
        raise AssertionError("symmetry group is not closed")


@dataclass(frozen=True)
class MoveSet:
    """Black king's legal destinations plus whether taking the rook is legal."""

    destinations: frozenset[Square]
    captures_rook: bool

    def __len__(self) -> int:
        return len(self.destinations) + (1 if self.captures_rook else 0)


def _king_steps(sq: Square):
    for df in (-1, 0, 1):
        for dr in (-1, 0, 1):
            if df == 0 and dr == 0:
                continue
            f, r = sq.file + df, sq.rank + dr
            if 1 <= f <= 8 and 1 <= r <= 8:
                yield Square(f, r)


def legal_black_moves(p: Position) -> MoveSet:
    """All legal black king moves.  Rook attacks are computed with the moving
    king transparent (a king cannot retreat along the attacking line), and
    taking the rook is legal only when the white king does not defend it."""
    if p.side_to_move is not Side.BLACK:
        raise ValueError("black is not to move")
    dests = set()
    captures = False
    for target in _king_steps(p.bk):
        if target == p.wk or is_adjacent(target, p.wk):
            continue
        if target == p.wr:
            captures = True  # adjacency to wk already excluded: rook undefended
            continue
        if rook_attacks(p.wr, p.wk, target):
            continue
        dests.add(target)
    return MoveSet(frozenset(dests), captures)


def legal_white_moves(p: Position) -> list[tuple[Piece, Square]]:
    """All legal white moves as (piece, destination) pairs, king moves first,
    each group in square order."""
    if p.side_to_move is not Side.WHITE:
        raise ValueError("white is not to move")
    moves = []
    for target in _king_steps(p.wk):
        if target == p.wr or target == p.bk or is_adjacent(target, p.bk):
            continue
        moves.append((Piece.KING, target))
    rook_targets = []
    for df, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        f, r = p.wr.file + df, p.wr.rank + dr
        while 1 <= f <= 8 and 1 <= r <= 8:
            sq = Square(f, r)
            if sq == p.wk or sq == p.bk:
                break
            rook_targets.append(sq)
            f, r = f + df, r + dr
    moves.sort(key=lambda m: m[1].index)
    rook_targets.sort(key=lambda s: s.index)
    return moves + [(Piece.ROOK, sq) for sq in rook_targets]


class Status(Enum):
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    ONGOING = "ongoing"


def status(p: Position) -> Status:
    """Terminal classification of a black-to-move position."""
    moves = legal_black_moves(p)
    if len(moves) > 0:
        return Status.ONGOING
    if rook_attacks(p.wr, p.wk, p.bk):
        return Status.CHECKMATE
    return Status.STALEMATE


def _canonical_key(p: Position) -> tuple[int, ...]:
    # Rank-major on the white king, then the black king, then the rook.
    # This is the representative convention of the reference data file:
    # it pins the white king into the a1-d1-d4 triangle and, with the king
    # on the long diagonal, prefers the black king at the lower rank.
    return (
        p.wk.rank, p.wk.file,
        p.bk.rank, p.bk.file,
        p.wr.rank, p.wr.file,
    )


def canonicalize(p: Position) -> tuple[Position, SymmetryTransform]:
    """Representative of `p`'s symmetry orbit plus the transform that maps
    `p` onto it.  Deterministic and idempotent; ties between transforms on
    self-symmetric positions resolve to the first in enum order."""
    best = None
    best_t = None
    for t in SymmetryTransform:
        q = t.apply_position(p)
        key = _canonical_key(q)
        if best is None or key < _canonical_key(best):
            best, best_t = q, t
    return best, best_t
