"""Unconditional life detection (Benson's algorithm).

A block is unconditionally alive when it is safe from capture even if the
opponent may play an unlimited number of consecutive moves. The fixed point
below repeatedly discards candidate blocks that do not have at least two
vital regions, where a region (a maximal connected set of non-`color` cells)
is vital to a block iff every empty cell of the region is a liberty of that
block, and a region only counts while all color stones adjacent to it belong
to still-candidate blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

from .board import Block, Board, EMPTY, blocks, neighbor_table


@dataclass(frozen=True)
class UcaReport:
    """Blocks proven unconditionally alive, with their vital regions."""

    alive_blocks: Tuple[Block, ...]
    vital_regions: Dict[Block, Tuple[frozenset, ...]]

    def alive_stones(self) -> frozenset:
        stones = set()
        for block in self.alive_blocks:
            stones.update(block.stones)
        return frozenset(stones)


def alive_block_indices(cells: bytes, width: int, height: int, color: int):
    """Core fixed point on raw cells; returns (alive blocks, vital regions).

    Blocks and regions are frozensets of cell indices. Exposed separately so
    search code can run it without building Board objects.
    """
    neigh = neighbor_table(width, height)

    # color blocks with liberties
    block_of = {}
    block_libs = []
    block_stones = []
    seen = set()
    for idx, value in enumerate(cells):
        if value != color or idx in seen:
            continue
        bid = len(block_stones)
        stack = [idx]
        seen.add(idx)
        stones = []
        libs = set()
        while stack:
            i = stack.pop()
            stones.append(i)
            block_of[i] = bid
            for n in neigh[i]:
                v = cells[n]
                if v == EMPTY:
                    libs.add(n)
                elif v == color and n not in seen:
                    seen.add(n)
                    stack.append(n)
        block_stones.append(frozenset(stones))
        block_libs.append(libs)

    if not block_stones:
        return [], {}

    # regions: maximal components of non-color cells
    region_cells = []
    region_empties = []
    region_adjacent = []  # block ids adjacent to the region
    seen = set()
    for idx, value in enumerate(cells):
        if value == color or idx in seen:
            continue
        stack = [idx]
        seen.add(idx)
        component = []
        empties = []
        adjacent = set()
        while stack:
            i = stack.pop()
            component.append(i)
            if cells[i] == EMPTY:
                empties.append(i)
            for n in neigh[i]:
                if cells[n] == color:
                    adjacent.add(block_of[n])
                elif n not in seen:
                    seen.add(n)
                    stack.append(n)
        region_cells.append(frozenset(component))
        region_empties.append(empties)
        region_adjacent.append(adjacent)

    # vitality is static; the fixed point only re-checks admissibility
    vital_to = []
    for rid in range(len(region_cells)):
        empties = region_empties[rid]
        vital_to.append({bid for bid in region_adjacent[rid]
                         if all(e in block_libs[bid] for e in empties)})

    alive = set(range(len(block_stones)))
    while True:
        admissible = [rid for rid in range(len(region_cells))
                      if region_adjacent[rid] <= alive]
        counts = {bid: 0 for bid in alive}
        for rid in admissible:
            for bid in vital_to[rid]:
                if bid in counts:
                    counts[bid] += 1
        next_alive = {bid for bid in alive if counts[bid] >= 2}
        if next_alive == alive:
            break
        alive = next_alive

    vital_map = {}
    admissible = [rid for rid in range(len(region_cells))
                  if region_adjacent[rid] <= alive]
    for bid in alive:
        vital_map[bid] = tuple(region_cells[rid] for rid in admissible
                               if bid in vital_to[rid])
    return [block_stones[bid] for bid in sorted(alive)], \
        {block_stones[bid]: vital_map[bid] for bid in alive}


def benson_alive(board: Board, color: int) -> UcaReport:
    """Blocks of `color` that are unconditionally alive on `board`."""
    alive_sets, vital = alive_block_indices(board.cells, board.width,
                                            board.height, color)
    alive_stone_sets = [frozenset(board.coord(i) for i in s)
                        for s in alive_sets]
    report_blocks = []
    vital_regions = {}
    if alive_sets:
        by_stones = {frozenset(b.stones): b for b in blocks(board, color)}
        for raw, stones in zip(alive_sets, alive_stone_sets):
            block = by_stones[stones]
            report_blocks.append(block)
            vital_regions[block] = tuple(
                frozenset(board.coord(i) for i in region)
                for region in vital[raw])
    return UcaReport(alive_blocks=tuple(report_blocks),
                     vital_regions=vital_regions)


def any_white_alive(cells: bytes, width: int, height: int) -> bool:
    """Fast check used by the solver: does White own any alive block?"""
    from .board import WHITE

    alive, _ = alive_block_indices(cells, width, height, WHITE)
    return bool(alive)
