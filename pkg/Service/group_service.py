from functools import lru_cache
from fractions import Fraction
from typing import Optional, Sequence, Tuple
import logging
import re

import numpy as np
from pydantic import ValidationError

from Entity.radix import MAX_PRODUCT, CellIndex, RadixSystem, VilenkinIndex
from Service.base_service import VilenkinError, require

logger = logging.getLogger(__name__)

_POWER_SPEC = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


class GroupService:
    @staticmethod
    def build_radix_system(radices: Sequence[int], depth: Optional[int] = None) -> RadixSystem:
        """Build the truncated system; a shorter radix list repeats periodically up to depth"""
        radices = [int(m) for m in radices]
        require(len(radices) > 0, "invalid-radix", "at least one radix is required")
        if depth is None:
            depth = len(radices)
        require(depth >= 1, "invalid-argument", f"depth must be >= 1, got {depth}")
        bad = [m for m in radices if m < 2]
        require(not bad, "invalid-radix", f"every radix must be >= 2, got {bad[0] if bad else None}")

        full = [radices[k % len(radices)] for k in range(depth)]
        products = [1]
        for k, m in enumerate(full):
            nxt = products[-1] * m
            if nxt > MAX_PRODUCT:
                raise VilenkinError("depth-too-large", f"M_{k + 1} exceeds 64 bits at depth {depth}")
            products.append(nxt)
        try:
            return RadixSystem(radices=tuple(full), depth=depth, products=tuple(products), lam=max(full))
        except ValidationError as e:
            raise VilenkinError("invalid-radix", str(e))

    @staticmethod
    def dyadic(depth: int) -> RadixSystem:
        return GroupService.build_radix_system([2], depth)

    @staticmethod
    def parse_radix_spec(text: str, depth: Optional[int] = None) -> RadixSystem:
        """Parse "2,3,4" (explicit, periodic up to depth) or "m^N" (constant radix m, depth N)"""
        match = _POWER_SPEC.match(text or "")
        if match:
            radix, power = int(match.group(1)), int(match.group(2))
            if depth is not None and depth != power:
                logger.info("depth %d overrides the exponent in %r", depth, text)
            return GroupService.build_radix_system([radix], depth if depth is not None else power)
        try:
            radices = [int(part) for part in text.split(",") if part.strip()]
        except (AttributeError, ValueError):
            raise VilenkinError("parse-error", f"cannot parse radix spec {text!r}; use '2,3,4' or '2^10'")
        require(len(radices) > 0, "parse-error", f"empty radix spec {text!r}")
        return GroupService.build_radix_system(radices, depth)

    @staticmethod
    def truncate(sys: RadixSystem, depth: int) -> RadixSystem:
        """Same generating sequence cut at a smaller depth"""
        require(1 <= depth <= sys.depth, "out-of-range", f"depth {depth} outside [1, {sys.depth}]")
        if depth == sys.depth:
            return sys
        return RadixSystem(
            radices=sys.radices[:depth], depth=depth, products=sys.products[: depth + 1], lam=max(sys.radices[:depth])
        )

    @staticmethod
    def decompose(n: int, sys: RadixSystem) -> VilenkinIndex:
        require(0 <= n < sys.size, "out-of-range", f"n={n} outside [0, {sys.size})")
        digits = GroupService._digits(n, sys)
        nonzero = [j for j, d in enumerate(digits) if d]
        return VilenkinIndex(sys=sys, value=n, digits=digits, order=max(nonzero) if nonzero else -1)

    @staticmethod
    def compose(digits: Sequence[int], sys: RadixSystem) -> int:
        require(len(digits) == sys.depth, "system-mismatch", f"expected {sys.depth} digits, got {len(digits)}")
        for j, (d, m) in enumerate(zip(digits, sys.radices)):
            require(0 <= d < m, "out-of-range", f"digit {j} = {d} outside [0, {m})")
        return sum(int(d) * M for d, M in zip(digits, sys.products))

    @staticmethod
    def order(n: int, sys: RadixSystem) -> int:
        """|n|, the highest nonzero digit position (-1 for n = 0)"""
        return GroupService.decompose(n, sys).order

    @staticmethod
    def cell_index(t: int, sys: RadixSystem) -> CellIndex:
        require(0 <= t < sys.size, "out-of-range", f"cell t={t} outside [0, {sys.size})")
        return CellIndex(sys=sys, t=t, coords=GroupService._digits(t, sys))

    @staticmethod
    def cell_from_coords(coords: Sequence[int], sys: RadixSystem) -> CellIndex:
        t = GroupService.compose(coords, sys)
        return CellIndex(sys=sys, t=t, coords=tuple(int(x) for x in coords))

    @staticmethod
    def group_add(x: CellIndex, y: CellIndex, sys: RadixSystem) -> CellIndex:
        """Coordinatewise addition mod m_j"""
        GroupService._check_system(sys, x, y)
        coords = tuple((a + b) % m for a, b, m in zip(x.coords, y.coords, sys.radices))
        return GroupService.cell_from_coords(coords, sys)

    @staticmethod
    def group_neg(x: CellIndex, sys: Optional[RadixSystem] = None) -> CellIndex:
        sys = sys or x.sys
        GroupService._check_system(sys, x)
        coords = tuple((m - a) % m for a, m in zip(x.coords, sys.radices))
        return GroupService.cell_from_coords(coords, sys)

    @staticmethod
    def cell_measure(rank: int, sys: RadixSystem) -> Fraction:
        """Haar measure of a rank-n cylinder, 1/M_n"""
        require(0 <= rank <= sys.depth, "out-of-range", f"rank {rank} outside [0, {sys.depth}]")
        return Fraction(1, sys.products[rank])

    @staticmethod
    def cell_coordinates(sys: RadixSystem, level: int) -> np.ndarray:
        """x_level for every cell t = 0..M_N-1 (read-only)"""
        require(0 <= level < sys.depth, "out-of-range", f"level {level} outside [0, {sys.depth})")
        return _cell_coordinates(sys, level)

    @staticmethod
    def cylinder_mask(rank: int, sys: RadixSystem) -> np.ndarray:
        """Boolean mask of I_rank = I_rank(0), the cells whose first rank coordinates vanish"""
        require(0 <= rank <= sys.depth, "out-of-range", f"rank {rank} outside [0, {sys.depth}]")
        return np.arange(sys.size, dtype=np.int64) % sys.products[rank] == 0

    @staticmethod
    def _digits(n: int, sys: RadixSystem) -> Tuple[int, ...]:
        digits = []
        for m in sys.radices:
            n, d = divmod(n, m)
            digits.append(d)
        return tuple(digits)

    @staticmethod
    def _check_system(sys: RadixSystem, *cells: CellIndex):
        for cell in cells:
            if cell.sys != sys:
                raise VilenkinError(
                    "system-mismatch", f"cell built for {cell.sys.label()} used with {sys.label()}"
                )


@lru_cache(maxsize=128)
def _cell_coordinates(sys: RadixSystem, level: int) -> np.ndarray:
    t = np.arange(sys.size, dtype=np.int64)
    coords = (t // sys.products[level]) % sys.radices[level]
    coords.setflags(write=False)
    return coords
