"""Retrograde solver for the king-rook-vs-king endgame.

Computes the optimal depth-of-win for White (0..16 white moves, otherwise
drawn) over the full position space by breadth-first propagation backwards
from checkmates, then exports one record per canonical black-to-move
position and can verify an external dataset file against the solved values.

Positions are packed into a dense 18-bit index (wk << 12 | wr << 6 | bk)
with one value array per side to move; the solver works on raw square
indices 0..63 for speed and is cross-checked against the square-level move
generators in `board` by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .board import Position, Side, Square, SymmetryTransform, canonicalize, validate_position
from .dataset import CLASS_LABELS, LABEL_INDEX, Record

# Value sentinels shared by both per-side arrays; values >= 0 are win depths
# in white moves remaining.
ILLEGAL = -3
UNKNOWN = -2
DRAW = -1

N_SLOTS = 1 << 18


class UnknownPositionError(ValueError):
    """A record does not decode to a legal black-to-move position."""


@dataclass(frozen=True)
class GameValue:
    """Draw, or win for White in `depth` further white moves."""

    depth: int | None  # None = draw

    @property
    def is_win(self) -> bool:
        return self.depth is not None

    @property
    def label(self) -> str:
        return "draw" if self.depth is None else CLASS_LABELS[self.depth + 1]

    @classmethod
    def from_label(cls, label: str) -> "GameValue":
        idx = LABEL_INDEX[label]
        return cls(None) if idx == 0 else cls(idx - 1)


def _king_masks():
    nbr_mask = []
    nbr_list = []
    for s in range(64):
        f, r = s % 8, s // 8
        m = 0
        squares = []
        for df in (-1, 0, 1):
            for dr in (-1, 0, 1):
                if df == 0 and dr == 0:
                    continue
                nf, nr = f + df, r + dr
                if 0 <= nf < 8 and 0 <= nr < 8:
                    t = nr * 8 + nf
                    m |= 1 << t
                    squares.append(t)
        nbr_mask.append(m)
        nbr_list.append(tuple(squares))
    zone = [m | (1 << s) for s, m in enumerate(nbr_mask)]
    return nbr_mask, nbr_list, zone


def _rook_rays():
    rays = []
    for s in range(64):
        f, r = s % 8, s // 8
        four = []
        for df, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            line = []
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                line.append(nr * 8 + nf)
                nf, nr = nf + df, nr + dr
            four.append(tuple(line))  # ordered outward from s
        rays.append(tuple(four))
    return rays


def _rook_attack_masks(rays):
    # att[wk][wr]: squares attacked by a rook on wr with the white king on wk
    # as the only blocker (the blocker square itself is included).
    att = [[0] * 64 for _ in range(64)]
    for wk in range(64):
        row = att[wk]
        for wr in range(64):
            if wr == wk:
                continue
            m = 0
            for line in rays[wr]:
                for t in line:
                    m |= 1 << t
                    if t == wk:
                        break
            row[wr] = m
    return att

_NBR_MASK, _NBR_LIST, _ZONE = _king_masks()
_RAYS = _rook_rays()
_ROOK_ATT = _rook_attack_masks(_RAYS)

# Per-transform square permutation tables, index-aligned with board squares.
_TRANS_SQ = [
    tuple(t.apply(Square.from_index(s)).index for s in range(64))
    for t in SymmetryTransform
]
_TRANSFORMS = list(SymmetryTransform)

# Squares the white king can occupy in a canonical position: the a1-d1-d4
# triangle (rank <= file <= 4 in 1-based coordinates).
_TRIANGLE = tuple(s for s in range(64) if s // 8 <= s % 8 <= 3)


def _canonical_index(wk: int, wr: int, bk: int) -> int:
    best_key = None
    best = -1
    for table in _TRANS_SQ:
        twk, twr, tbk = table[wk], table[wr], table[bk]
        key = (
            twk >> 3, twk & 7,
            tbk >> 3, tbk & 7,
            twr >> 3, twr & 7,
        )
        if best_key is None or key < best_key:
            best_key = key
            best = (twk << 12) | (twr << 6) | tbk
    return best


class Tablebase:
    """Solved game values for every legal position, both sides to move."""

    def __init__(self, btm: list[int], wtm: list[int]):
        self._btm = btm
        self._wtm = wtm
        self._canonical: list[int] | None = None

    def _value_from_slot(self, raw: int) -> GameValue:
        if raw == ILLEGAL:
            raise UnknownPositionError("position is not legal")
        return GameValue(None) if raw == DRAW else GameValue(raw)

    def value_at(self, wk: int, wr: int, bk: int, side: Side = Side.BLACK) -> GameValue:
        i = (wk << 12) | (wr << 6) | bk
        return self._value_from_slot(self._btm[i] if side is Side.BLACK else self._wtm[i])

    def value(self, p: Position) -> GameValue:
        return self.value_at(p.wk.index, p.wr.index, p.bk.index, p.side_to_move)

    @property
    def max_depth(self) -> int:
        return max(v for v in self._btm if v >= 0)

    def canonical_indices(self) -> list[int]:
        """Packed indices of every canonical legal black-to-move position."""
        if self._canonical is None:
            found = []
            btm = self._btm
            for wk in _TRIANGLE:
                hi = wk << 12
                for wr in range(64):
                    mid = hi | (wr << 6)
                    for bk in range(64):
                        i = mid | bk
                        if btm[i] != ILLEGAL and _canonical_index(wk, wr, bk) == i:
                            found.append(i)
            self._canonical = found
        return self._canonical

    def depth_histogram(self) -> dict[str, int]:
        """Label counts over the canonical black-to-move set."""
        counts = {label: 0 for label in CLASS_LABELS}
        for i in self.canonical_indices():
            v = self._btm[i]
            counts["draw" if v == DRAW else CLASS_LABELS[v + 1]] += 1
        return counts


def solve() -> Tablebase:
    """Solve the whole space by retrograde breadth-first propagation.

    Black-to-move terminal analysis seeds the frontier: checkmates are wins
    in zero, stalemates and positions with a safe rook capture are draws.
    Each subsequent layer alternates white-to-move wins (any move into the
    previous black layer) and black-to-move wins (all moves exhausted into
    white wins).  Unreached legal positions are draws.
    """
    nbr_mask, nbr_list, zone = _NBR_MASK, _NBR_LIST, _ZONE
    rays, rook_att = _RAYS, _ROOK_ATT

    btm = [ILLEGAL] * N_SLOTS
    wtm = [ILLEGAL] * N_SLOTS
    pending = bytearray(N_SLOTS)  # unresolved black move counts
    frontier = []

    for wk in range(64):
        wk_zone = zone[wk]
        att_row = rook_att[wk]
        for wr in range(64):
            if wr == wk:
                continue
            att = att_row[wr]
            base = (wk << 12) | (wr << 6)
            wr_bit = 1 << wr
            rook_defended = (wk_zone >> wr) & 1
            blocked = wk_zone | att | wr_bit
            for bk in range(64):
                if bk == wr or (wk_zone >> bk) & 1:
                    continue
                i = base | bk
                if not (att >> bk) & 1:
                    wtm[i] = UNKNOWN
                moves = nbr_mask[bk] & ~blocked
                if not rook_defended and (nbr_mask[bk] >> wr) & 1:
                    btm[i] = DRAW  # taking the rook leaves a dead draw
                elif moves:
                    btm[i] = UNKNOWN
                    pending[i] = moves.bit_count()
                elif (att >> bk) & 1:
                    btm[i] = 0  # checkmate
                    frontier.append(i)
                else:
                    btm[i] = DRAW  # stalemate

    depth = 0
    while frontier:
        next_wtm = []
        for i in frontier:
            wk, wr, bk = i >> 12, (i >> 6) & 63, i & 63
            bk_zone = zone[bk]
            # retract a white king move
            for s in nbr_list[wk]:
                if s == wr or (bk_zone >> s) & 1:
                    continue
                if (rook_att[s][wr] >> bk) & 1:
                    continue  # black would already stand in check
                q = (s << 12) | (wr << 6) | bk
                if wtm[q] == UNKNOWN:
                    wtm[q] = depth + 1
                    next_wtm.append(q)
            # retract a rook move along each clear ray
            att_from = rook_att[wk]
            head = wk << 12
            for line in rays[wr]:
                for t in line:
                    if t == wk or t == bk:
                        break
                    if (att_from[t] >> bk) & 1:
                        continue
                    q = head | (t << 6) | bk
                    if wtm[q] == UNKNOWN:
                        wtm[q] = depth + 1
                        next_wtm.append(q)

        depth += 1
        frontier = []
        for q in next_wtm:
            wk, wr, bk = q >> 12, (q >> 6) & 63, q & 63
            wk_zone = zone[wk]
            base = (wk << 12) | (wr << 6)
            # retract a black king move; a position whose every move is now
            # known to lose becomes a win at the current depth (the max).
            for u in nbr_list[bk]:
                if u == wr or (wk_zone >> u) & 1:
                    continue
                r = base | u
                if btm[r] == UNKNOWN:
                    left = pending[r] - 1
                    pending[r] = left
                    if left == 0:
                        btm[r] = depth
                        frontier.append(r)

    for i in range(N_SLOTS):
        if btm[i] == UNKNOWN:
            btm[i] = DRAW
        if wtm[i] == UNKNOWN:
            wtm[i] = DRAW
    return Tablebase(btm, wtm)


def classify(tb: Tablebase, p: Position) -> str:
    """Class label of the position's symmetry representative."""
    if p.side_to_move is not Side.BLACK:
        raise UnknownPositionError("dataset labels are defined for black to move")
    rep, _ = canonicalize(p)
    return tb.value(rep).label


def _record_sort_key(r: Record):
    v = r.ordinal_values()
    return (LABEL_INDEX[r.label], v)


def export_dataset(tb: Tablebase) -> list[Record]:
    """One record per canonical black-to-move position, grouped by class
    (draws first, then wins by increasing depth) and ordered by square
    coordinates within each class, matching the reference file layout."""
    records = []
    for i in tb.canonical_indices():
        wk, wr, bk = i >> 12, (i >> 6) & 63, i & 63
        raw = tb._btm[i]
        label = "draw" if raw == DRAW else CLASS_LABELS[raw + 1]
        records.append(
            Record(
                "abcdefgh"[wk & 7], (wk >> 3) + 1,
                "abcdefgh"[wr & 7], (wr >> 3) + 1,
                "abcdefgh"[bk & 7], (bk >> 3) + 1,
                label,
            )
        )
    records.sort(key=_record_sort_key)
    return records


def write_dataset(tb: Tablebase, path: str) -> int:
    records = export_dataset(tb)
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r.to_line() + "\n")
    return len(records)


@dataclass(frozen=True)
class Disagreement:
    record: Record
    dataset_label: str
    oracle_label: str


@dataclass(frozen=True)
class VerificationReport:
    n_records: int
    n_agree: int
    disagreements: tuple[Disagreement, ...]
    histogram_delta: dict[str, int]  # dataset count minus oracle canonical count

    @property
    def agreement_ratio(self) -> float:
        return 1.0 if self.n_records == 0 else self.n_agree / self.n_records

    @property
    def success(self) -> bool:
        return self.n_agree == self.n_records


def verify_against_dataset(tb: Tablebase, records: list[Record]) -> VerificationReport:
    """Compare dataset labels against the solved values, position by position
    (each record is canonicalized first, so any representative convention is
    accepted).  Disagreements are reported, never patched."""
    disagreements = []
    dataset_counts = {label: 0 for label in CLASS_LABELS}
    for rec in records:
        reason = validate_position(*rec._squares(), Side.BLACK)
        if reason is not None:
            raise UnknownPositionError(f"{rec.to_line()}: {reason}")
        dataset_counts[rec.label] += 1
        oracle_label = classify(tb, rec.to_position())
        if oracle_label != rec.label:
            disagreements.append(Disagreement(rec, rec.label, oracle_label))
    if records:
        oracle_counts = tb.depth_histogram()
        delta = {k: dataset_counts[k] - oracle_counts[k] for k in CLASS_LABELS}
    else:
        delta = {k: 0 for k in CLASS_LABELS}
    return VerificationReport(
        n_records=len(records),
        n_agree=len(records) - len(disagreements),
        disagreements=tuple(disagreements),
        histogram_delta=delta,
    )
