"""Two-pass local seki verification and database construction.

A pattern is embedded as a minimal board: the area cells sit inside a solid
white enclosure occupying every other cell, and the board edge seals the
enclosure's outside (standing in for the black boundary). The area is then
searched twice, with Black and White each playing first. The first player
(the attacker) may not pass on the first move and loses when a double pass
occurs before any terminal; Black wins by capturing the enclosing block,
White by making it unconditionally alive. A pattern is seki exactly when
both attackers lose.

The search state is just the area contents: the enclosure never changes
until it is captured, which ends the game. Search is plain depth-first
and-or with a transposition table; entries are stored only when the subtree
result did not depend on superko rejections against positions above the
node, which keeps cached values history-free.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

from enum import Enum

from .board import BLACK, EMPTY, WHITE, Board, Coord, neighbor_table
from .shapes import (MAX_AREA, MIN_AREA, Pattern, Shape, SizeOutOfRangeError,
                     canonical_key, enumerate_patterns, enumerate_shapes)


class IllegalPatternError(Exception):
    """The pattern cannot occur as a legal Go position."""


class LocalOutcome(Enum):
    SEKI = "Seki"
    BLACK_KILLS = "BlackKills"
    WHITE_LIVES = "WhiteLives"
    ILLEGAL_PATTERN = "IllegalPattern"


@dataclass(frozen=True)
class LocalPosition:
    """Minimal board embedding of a pattern."""

    board: Board
    area: Tuple[Coord, ...]
    anchor: Coord  # a cell of the enclosing white block


@dataclass
class SizeStats:
    patterns: int = 0
    illegal: int = 0
    seki: int = 0
    seconds: float = 0.0

    @property
    def seki_rate(self) -> float:
        return self.seki / self.patterns if self.patterns else 0.0


@dataclass
class DatabaseStats:
    per_size: Dict[int, SizeStats] = field(default_factory=dict)

    def lines(self) -> list:
        out = []
        for n in sorted(self.per_size):
            s = self.per_size[n]
            out.append(f"size={n} patterns={s.patterns} seki={s.seki} "
                       f"rate={s.seki_rate:.4f} seconds={s.seconds:.2f}")
        return out

    def totals(self) -> SizeStats:
        total = SizeStats()
        for s in self.per_size.values():
            total.patterns += s.patterns
            total.illegal += s.illegal
            total.seki += s.seki
            total.seconds += s.seconds
        return total


# ---------------------------------------------------------------------------
# area context: everything about a shape's geometry that the search needs

@dataclass(frozen=True)
class _AreaContext:
    cells: Tuple[Tuple[int, int], ...]     # shape cells, sorted
    adj: Tuple[Tuple[int, ...], ...]       # area-local adjacency
    wall_touch: Tuple[bool, ...]           # cell touches the enclosure
    enclosure_connected: bool

    @property
    def n(self) -> int:
        return len(self.cells)


_ctx_cache: Dict[Tuple[Tuple[int, int], ...], _AreaContext] = {}


def _build_context(shape: Shape) -> _AreaContext:
    ctx = _ctx_cache.get(shape.cells)
    if ctx is not None:
        return ctx
    cells = shape.cells
    index = {cell: i for i, cell in enumerate(cells)}
    adj = []
    wall_touch = []
    for c, r in cells:
        near = []
        for nb in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
            if nb in index:
                near.append(index[nb])
        adj.append(tuple(near))
        wall_touch.append(len(near) < 4)
    # the enclosure is the complement of the area inside a one-cell margin;
    # it must form a single block (fails only for shapes enclosing a hole)
    w, h = shape.bbox
    width, height = w + 2, h + 2
    area_idx = {(r + 1) * width + (c + 1) for c, r in cells}
    neigh = neighbor_table(width, height)
    enclosure = [i for i in range(width * height) if i not in area_idx]
    stack = [enclosure[0]]
    seen = {enclosure[0]}
    while stack:
        i = stack.pop()
        for nb in neigh[i]:
            if nb not in area_idx and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    ctx = _AreaContext(cells=cells, adj=tuple(adj), wall_touch=tuple(wall_touch),
                       enclosure_connected=len(seen) == len(enclosure))
    _ctx_cache[shape.cells] = ctx
    return ctx


def _initial_state(pattern: Pattern) -> bytes:
    return bytes(BLACK if cell in pattern.black else EMPTY
                 for cell in pattern.shape.cells)


def _legal_embedding(ctx: _AreaContext, state: bytes) -> Optional[str]:
    """None when the embedding is a legal position, else a reason."""
    if not ctx.enclosure_connected:
        return "enclosing white block is not a single block"
    if not any(state[i] == EMPTY and ctx.wall_touch[i] for i in range(ctx.n)):
        return "enclosing white block would have no liberties"
    seen = set()
    for i in range(ctx.n):
        if state[i] != BLACK or i in seen:
            continue
        stack = [i]
        seen.add(i)
        has_lib = False
        while stack:
            j = stack.pop()
            for k in ctx.adj[j]:
                if state[k] == EMPTY:
                    has_lib = True
                elif state[k] == BLACK and k not in seen:
                    seen.add(k)
                    stack.append(k)
        if not has_lib:
            return "interior black block would have no liberties"
    return None


def embed(pattern: Pattern) -> LocalPosition:
    """Embed a pattern on a minimal board with a solid white enclosure.

    Raises IllegalPatternError when the embedding cannot be a legal position
    (no enclosure liberties, or a shape whose enclosure splits in two).
    """
    ctx = _build_context(pattern.shape)
    state = _initial_state(pattern)
    reason = _legal_embedding(ctx, state)
    if reason is not None:
        raise IllegalPatternError(reason)
    w, h = pattern.shape.bbox
    width, height = w + 2, h + 2
    cells = bytearray([WHITE] * (width * height))
    for c, r in pattern.shape.cells:
        idx = (r + 1) * width + (c + 1)
        cells[idx] = BLACK if (c, r) in pattern.black else EMPTY
    board = Board(width, height, bytes(cells), to_move=BLACK)
    area = tuple((c + 1, r + 1) for c, r in pattern.shape.cells)
    return LocalPosition(board=board, area=area, anchor=(0, 0))


# ---------------------------------------------------------------------------
# local move application

_WALL_CAPTURED = object()


def _wall_whites(buf, ctx) -> set:
    """Inside white cells connected (possibly via each other) to the enclosure."""
    stack = [i for i in range(ctx.n) if buf[i] == WHITE and ctx.wall_touch[i]]
    seen = set(stack)
    while stack:
        i = stack.pop()
        for j in ctx.adj[i]:
            if buf[j] == WHITE and j not in seen:
                seen.add(j)
                stack.append(j)
    return seen


def _wall_has_liberty(buf, ctx, wall_set) -> bool:
    for i in range(ctx.n):
        if buf[i] == EMPTY and (ctx.wall_touch[i]
                                or any(j in wall_set for j in ctx.adj[i])):
            return True
    return False


def _group_if_dead(buf, start, ctx) -> Tuple[int, ...]:
    """Stones of the (non-wall) block at start when it has no liberties."""
    color = buf[start]
    seen = {start}
    stack = [start]
    stones = []
    while stack:
        i = stack.pop()
        stones.append(i)
        for j in ctx.adj[i]:
            v = buf[j]
            if v == EMPTY:
                return ()
            if v == color and j not in seen:
                seen.add(j)
                stack.append(j)
    return tuple(stones)


def _apply(state: bytes, i: int, color: int, ctx: _AreaContext):
    """Play inside the area. Returns the new area state, None for suicide,
    or _WALL_CAPTURED when the move captures the enclosing block."""
    buf = bytearray(state)
    buf[i] = color
    adj = ctx.adj
    if color == BLACK:
        wall_set = _wall_whites(buf, ctx)
        wall_adjacent = ctx.wall_touch[i] or any(j in wall_set for j in adj[i])
        if wall_adjacent and not _wall_has_liberty(buf, ctx, wall_set):
            return _WALL_CAPTURED
        captured = False
        for j in adj[i]:
            if buf[j] == WHITE and j not in wall_set:
                dead = _group_if_dead(buf, j, ctx)
                if dead:
                    for s in dead:
                        buf[s] = EMPTY
                    captured = True
        if not captured and _group_if_dead(buf, i, ctx):
            return None
        return bytes(buf)
    # white move
    captured = False
    for j in adj[i]:
        if buf[j] == BLACK:
            dead = _group_if_dead(buf, j, ctx)
            if dead:
                for s in dead:
                    buf[s] = EMPTY
                captured = True
    if not captured:
        wall_set = _wall_whites(buf, ctx)
        if i in wall_set:
            if not _wall_has_liberty(buf, ctx, wall_set):
                return None
        elif _group_if_dead(buf, i, ctx):
            return None
    return bytes(buf)


def _wall_alive(state: bytes, ctx: _AreaContext) -> bool:
    """Is the enclosing block unconditionally alive on the local board?

    Mirrors Benson's fixed point restricted to the embedding; equivalence
    with the generic implementation is covered by tests.
    """
    n = ctx.n
    adj = ctx.adj
    wall_touch = ctx.wall_touch
    wall_set = _wall_whites(state, ctx)

    # island blocks: inside whites not connected to the enclosure
    island_of = {}
    islands = 0
    for i in range(n):
        if state[i] == WHITE and i not in wall_set and i not in island_of:
            islands += 1
            bid = islands
            stack = [i]
            island_of[i] = bid
            while stack:
                j = stack.pop()
                for k in adj[j]:
                    if state[k] == WHITE and k not in wall_set \
                            and k not in island_of:
                        island_of[k] = bid
                        stack.append(k)

    def liberties_of(bid) -> set:
        libs = set()
        for i in range(n):
            if state[i] != EMPTY:
                continue
            if bid == 0:
                if wall_touch[i] or any(j in wall_set for j in adj[i]):
                    libs.add(i)
            elif any(island_of.get(j) == bid for j in adj[i]):
                libs.add(i)
        return libs

    block_libs = {0: liberties_of(0)}
    for bid in range(1, islands + 1):
        block_libs[bid] = liberties_of(bid)

    # regions: components of non-white area cells
    regions = []
    seen = set()
    for i in range(n):
        if state[i] == WHITE or i in seen:
            continue
        stack = [i]
        seen.add(i)
        comp = []
        empties = []
        adjacent = set()
        while stack:
            j = stack.pop()
            comp.append(j)
            if state[j] == EMPTY:
                empties.append(j)
            if wall_touch[j]:
                adjacent.add(0)
            for k in adj[j]:
                if state[k] == WHITE:
                    adjacent.add(0 if k in wall_set else island_of[k])
                elif k not in seen:
                    seen.add(k)
                    stack.append(k)
        regions.append((empties, adjacent))

    vital_to = []
    for empties, adjacent in regions:
        vital_to.append({bid for bid in adjacent
                         if all(e in block_libs[bid] for e in empties)})

    alive = set(range(islands + 1))
    while True:
        counts = {bid: 0 for bid in alive}
        for rid, (_, adjacent) in enumerate(regions):
            if adjacent <= alive:
                for bid in vital_to[rid]:
                    if bid in counts:
                        counts[bid] += 1
        next_alive = {bid for bid in alive if counts[bid] >= 2}
        if next_alive == alive:
            break
        alive = next_alive
    return 0 in alive


# ---------------------------------------------------------------------------
# and-or search

_INF_DEPTH = 1 << 30
_PASS = -1


def _search(ctx: _AreaContext, root_state: bytes, attacker: int,
            tt: Optional[dict] = None) -> bool:
    """True when the attacker, moving first (no pass), wins the local fight."""
    if tt is None:
        tt = {}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))
    n = ctx.n
    path = {(root_state, attacker): 0}

    def value(state, to_move, passes, depth):
        tk = (state, to_move, passes)
        cached = tt.get(tk)
        if cached is not None:
            return cached, _INF_DEPTH
        if _wall_alive(state, ctx):
            v = attacker == WHITE
            tt[tk] = v
            return v, _INF_DEPTH
        if passes >= 2:
            tt[tk] = False
            return False, _INF_DEPTH
        is_or = to_move == attacker
        opp = 3 - to_move
        result = not is_or
        decisive_dep = None
        agg_dep = _INF_DEPTH
        for mv in range(n + 1):
            if mv == n:  # pass, tried last
                ck = (state, opp)
                added = ck not in path
                if added:
                    path[ck] = depth + 1
                v, dep = value(state, opp, passes + 1, depth + 1)
                if added:
                    del path[ck]
            else:
                if state[mv] != EMPTY:
                    continue
                res = _apply(state, mv, to_move, ctx)
                if res is None:
                    continue
                if res is _WALL_CAPTURED:
                    v, dep = (attacker == BLACK), _INF_DEPTH
                else:
                    ck = (res, opp)
                    prior = path.get(ck)
                    if prior is not None:
                        agg_dep = min(agg_dep, prior)
                        continue
                    path[ck] = depth + 1
                    v, dep = value(res, opp, 0, depth + 1)
                    del path[ck]
            if is_or:
                if v:
                    result = True
                    decisive_dep = dep
                    break
                agg_dep = min(agg_dep, dep)
            else:
                if not v:
                    result = False
                    decisive_dep = dep
                    break
                agg_dep = min(agg_dep, dep)
        final_dep = decisive_dep if decisive_dep is not None else agg_dep
        if final_dep >= depth:
            tt[tk] = result
        return result, final_dep

    if _wall_alive(root_state, ctx):
        return attacker == WHITE
    defender = 3 - attacker
    for i in range(n):
        if root_state[i] != EMPTY:
            continue
        res = _apply(root_state, i, attacker, ctx)
        if res is None:
            continue
        if res is _WALL_CAPTURED:
            if attacker == BLACK:
                return True
            continue
        ck = (res, defender)
        if ck in path:
            continue
        path[ck] = 1
        v, _ = value(res, defender, 0, 1)
        del path[ck]
        if v:
            return True
    return False


def attacker_search(pos: LocalPosition, attacker: int) -> bool:
    """True when `attacker`, playing first inside the area, wins."""
    pattern = _pattern_from_position(pos)
    ctx = _build_context(pattern.shape)
    return _search(ctx, _initial_state(pattern), attacker)


def _pattern_from_position(pos: LocalPosition) -> Pattern:
    cells = []
    black = set()
    for col, row in pos.area:
        cells.append((col - 1, row - 1))
        if pos.board[(col, row)] == BLACK:
            black.add((col - 1, row - 1))
    return Pattern(Shape.from_cells(cells), frozenset(black))


def verify_local_outcome(pattern: Pattern) -> LocalOutcome:
    """Classify a pattern by the two-pass attacker search."""
    ctx = _build_context(pattern.shape)
    state = _initial_state(pattern)
    return _verify_state(ctx, state)


def _verify_state(ctx: _AreaContext, state: bytes,
                  tts: Optional[dict] = None) -> LocalOutcome:
    if _legal_embedding(ctx, state) is not None:
        return LocalOutcome.ILLEGAL_PATTERN
    if tts is None:
        tts = {BLACK: {}, WHITE: {}}
    if _search(ctx, state, BLACK, tts[BLACK]):
        return LocalOutcome.BLACK_KILLS
    if _search(ctx, state, WHITE, tts[WHITE]):
        return LocalOutcome.WHITE_LIVES
    return LocalOutcome.SEKI


# ---------------------------------------------------------------------------
# database construction

def verify_shape(shape: Shape):
    """Verify all distinct fills of one shape.

    Returns (unique_patterns, illegal, seki_keys). Fills that map to the
    same canonical key are counted once; the transposition tables are shared
    across fills of the shape since search states do not depend on the
    starting fill.
    """
    ctx = _build_context(shape)
    tts = {BLACK: {}, WHITE: {}}
    seen = set()
    illegal = 0
    seki_keys = []
    for pattern in enumerate_patterns(shape):
        key = canonical_key(pattern)
        if key in seen:
            continue
        seen.add(key)
        outcome = _verify_state(ctx, _initial_state(pattern), tts)
        if outcome is LocalOutcome.ILLEGAL_PATTERN:
            illegal += 1
        elif outcome is LocalOutcome.SEKI:
            seki_keys.append(key)
    return len(seen), illegal, seki_keys


def _verify_shape_task(args):
    n, shape = args
    return n, verify_shape(shape)


def build_database(sizes: Iterable[int], threads: int = 1, log=None):
    """Verify every pattern of the given sizes and collect the seki keys.

    Returns (SekiDatabase, DatabaseStats). With threads > 1 the shapes are
    verified by a process pool; results are merged sorted, so the database
    is identical regardless of thread count.
    """
    from .database import SekiDatabase

    sizes = sorted(set(sizes))
    for n in sizes:
        if not MIN_AREA <= n <= MAX_AREA:
            raise SizeOutOfRangeError(
                f"database sizes must be within [{MIN_AREA}, {MAX_AREA}], got {n}")
    entries = {}
    stats = DatabaseStats()
    for n in sizes:
        start = time.monotonic()
        shapes = enumerate_shapes(n)
        size_stats = SizeStats()
        keys = set()
        if threads > 1:
            import multiprocessing

            with multiprocessing.Pool(threads) as pool:
                results = pool.map(_verify_shape_task,
                                   [(n, s) for s in shapes], chunksize=1)
        else:
            results = [_verify_shape_task((n, s)) for s in shapes]
        for _, (patterns, illegal, seki_keys) in results:
            size_stats.patterns += patterns
            size_stats.illegal += illegal
            keys.update(seki_keys)
        size_stats.seki = len(keys)
        size_stats.seconds = time.monotonic() - start
        entries[n] = frozenset(keys)
        stats.per_size[n] = size_stats
        if log is not None:
            log(f"size={n} patterns={size_stats.patterns} "
                f"seki={size_stats.seki} rate={size_stats.seki_rate:.4f} "
                f"seconds={size_stats.seconds:.2f}")
    db = SekiDatabase(entries=entries, stats=stats)
    return db, stats
