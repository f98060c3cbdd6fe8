"""Independent brute-force referee for local fights.

Deliberately naive: plain recursive minimax over the full move set (stones
plus pass) using the public Board API, no transposition table, no move
ordering, no pruning beyond legality. Used to validate the verifier's
optimized search and the database's Hit guarantees.
"""

from __future__ import annotations

import sys

from sekigo.benson import benson_alive
from sekigo.board import (BLACK, EMPTY, PASS, WHITE, Board,
                          IllegalMoveError)

sys.setrecursionlimit(100_000)


def anchor_block_alive(board: Board, anchor) -> bool:
    report = benson_alive(board, WHITE)
    return any(anchor in block.stones for block in report.alive_blocks)


def attacker_wins(board: Board, area, anchor, attacker: int) -> bool:
    """Exhaustive value of the local fight with `attacker` moving first.

    Moves are restricted to the area cells plus pass; the attacker may not
    pass on the first move and loses when both sides pass consecutively.
    Black wins by capturing the block at `anchor`, White by making it
    unconditionally alive.
    """
    root = board.replace(to_move=attacker)
    if root[anchor] != WHITE:
        return attacker == BLACK
    if anchor_block_alive(root, anchor):
        return attacker == WHITE

    def value(bd: Board) -> bool:
        if bd[anchor] != WHITE:
            return attacker == BLACK
        if anchor_block_alive(bd, anchor):
            return attacker == WHITE
        if bd.consecutive_passes >= 2:
            return False
        is_or = bd.to_move == attacker
        for move in tuple(area) + (PASS,):
            if move is not PASS and bd[move] != EMPTY:
                continue
            try:
                child = bd.play(move)
            except IllegalMoveError:
                continue
            v = value(child)
            if is_or and v:
                return True
            if not is_or and not v:
                return False
        return not is_or

    for move in area:
        if root[move] != EMPTY:
            continue
        try:
            child = root.play(move)
        except IllegalMoveError:
            continue
        if value(child):
            return True
    return False


def local_outcome(board: Board, area, anchor) -> str:
    """Two-pass classification mirroring the verifier's contract."""
    if attacker_wins(board, area, anchor, BLACK):
        return "BlackKills"
    if attacker_wins(board, area, anchor, WHITE):
        return "WhiteLives"
    return "Seki"
