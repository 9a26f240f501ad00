"""Torus geometry for the toric code.

Spins live on the bonds of an L1 x L2 square lattice with periodic
boundaries in both directions, so there are 2*L1*L2 spins. Sites are indexed
row-major, ``site = y*L1 + x``; the horizontal bond leaving site (x, y) in
direction 1 gets spin index ``2*site`` and the vertical bond leaving it in
direction 2 gets ``2*site + 1``. This indexing is part of the on-disk
contract: golden files and shipped partitions rely on it.

A star support is the four bonds touching a site; a plaquette support is the
four bonds around a unit square. The two noncontractible loop supports wind
the torus once each and are the supports of the sector-changing X loops: a
column of vertical bonds for direction 1 and a row of horizontal bonds for
direction 2 (these are cycles of the dual lattice, crossing plaquettes
evenly, which is what a pure-X loop needs to commute with the Hamiltonian).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import gf2

__all__ = [
    "LatticeGeometry",
    "RegionPartition",
    "build_lattice",
    "stabilizer_support",
    "build_partition",
    "partition_presets",
    "region_winds",
    "complement_is_deformable",
    "geometry_to_json",
    "partition_to_json",
]


@dataclass(frozen=True)
class LatticeGeometry:
    """Immutable bond indexing of an L1 x L2 torus."""

    L1: int
    L2: int
    n_spins: int
    star_supports: tuple[tuple[int, ...], ...]
    plaquette_supports: tuple[tuple[int, ...], ...]
    horizontal_spins: tuple[int, ...]
    vertical_spins: tuple[int, ...]
    loop1_support: tuple[int, ...]
    loop2_support: tuple[int, ...]

    def site_index(self, x: int, y: int) -> int:
        return (y % self.L2) * self.L1 + (x % self.L1)

    def horizontal_bond(self, x: int, y: int) -> int:
        return 2 * self.site_index(x, y)

    def vertical_bond(self, x: int, y: int) -> int:
        return 2 * self.site_index(x, y) + 1


def build_lattice(L1: int, L2: int) -> LatticeGeometry:
    """Build the torus geometry for an L1 x L2 site lattice.

    Parameters
    ----------
    L1, L2 : int
        Sites along each direction, both at least 2 (below that the
        four-bond stabilizer supports would degenerate).

    Returns
    -------
    LatticeGeometry
    """
    if L1 < 2 or L2 < 2:
        raise ValueError(f"lattice must be at least 2x2, got {L1}x{L2}")
    n_sites = L1 * L2

    def h(x, y):
        return 2 * ((y % L2) * L1 + (x % L1))

    def v(x, y):
        return 2 * ((y % L2) * L1 + (x % L1)) + 1

    stars = []
    plaquettes = []
    for y in range(L2):
        for x in range(L1):
            # Star at site (x, y): the two horizontal and two vertical
            # bonds touching it.
            stars.append((h(x, y), h(x - 1, y), v(x, y), v(x, y - 1)))
            # Plaquette with (x, y) as its lower-left corner.
            plaquettes.append((h(x, y), h(x, y + 1), v(x, y), v(x + 1, y)))

    return LatticeGeometry(
        L1=L1,
        L2=L2,
        n_spins=2 * n_sites,
        star_supports=tuple(stars),
        plaquette_supports=tuple(plaquettes),
        horizontal_spins=tuple(range(0, 2 * n_sites, 2)),
        vertical_spins=tuple(range(1, 2 * n_sites, 2)),
        loop1_support=tuple(v(x, 0) for x in range(L1)),
        loop2_support=tuple(h(0, y) for y in range(L2)),
    )


def stabilizer_support(geometry: LatticeGeometry, kind: str, index: int) -> tuple[int, ...]:
    """Support of one star or plaquette operator.

    ``kind`` is "star" or "plaquette"; ``index`` runs over sites in the
    same row-major order used everywhere else.
    """
    if kind == "star":
        supports = geometry.star_supports
    elif kind == "plaquette":
        supports = geometry.plaquette_supports
    else:
        raise ValueError(f"unknown stabilizer kind {kind!r}")
    if not 0 <= index < len(supports):
        raise ValueError(f"{kind} index {index} out of range")
    return supports[index]


@dataclass(frozen=True)
class RegionPartition:
    """Four subsystem choices whose entropies isolate the topological term.

    The combination S1 + S3 - S2 - S4 cancels boundary contributions and
    equals twice the topological entropy. Each region must be contractible;
    the cancellation itself is certified by the entropy tests rather than
    by geometric construction.
    """

    regions: tuple[tuple[int, ...], ...]
    label: str

    def __post_init__(self):
        if len(self.regions) != 4:
            raise ValueError("a partition has exactly four regions")
        if any(len(r) == 0 for r in self.regions):
            raise ValueError("regions must be nonempty")


# Shipped region quadruples, keyed by (L1, L2) then preset name. The small
# lattices are too cramped for one scalable geometric recipe, so these are
# explicit index sets, chosen contractible and validated by the acceptance
# tests (topological entropy exactly 1 bit in every sector).
#
# "levinwen-small" uses two nested region pairs of matched shape; sizes stay
# comparable across lattice sizes so cross-size quench comparisons probe the
# bath, not the region. "levinwen-ring" (3x3 only) is the annulus family:
# R1 a closed ring around one star, R2/R3 horseshoes, R4 the shared arcs.
_PRESETS: dict[tuple[int, int], dict[str, tuple[tuple[int, ...], ...]]] = {
    (2, 2): {
        "levinwen-small": ((0, 3, 6), (0, 3), (2, 4, 7), (4, 7)),
    },
    (2, 3): {
        "levinwen-small": ((3, 4, 5, 8), (4, 5, 8), (6, 7, 9, 10), (6, 7, 10)),
    },
    (3, 3): {
        "levinwen-small": ((3, 8, 9, 14), (3, 8, 9), (5, 10, 11, 16), (5, 10, 11)),
        "levinwen-ring": (
            (7, 8, 9, 10, 13, 15),
            (2, 4, 7, 8, 9, 10, 13, 15),
            (2, 4, 7, 9, 13, 15),
            (7, 9, 13, 15),
        ),
    },
}


def partition_presets(geometry: LatticeGeometry) -> tuple[str, ...]:
    """Preset names shipped for this lattice size."""
    return tuple(sorted(_PRESETS.get((geometry.L1, geometry.L2), {})))


def build_partition(geometry: LatticeGeometry, preset: str) -> RegionPartition:
    """Look up a shipped region quadruple by name.

    Raises ValueError if the preset name is unknown or no preset of that
    name ships for this lattice size.
    """
    known = _PRESETS.get((geometry.L1, geometry.L2))
    if not known:
        raise ValueError(f"no partitions shipped for {geometry.L1}x{geometry.L2}")
    if preset not in known:
        raise ValueError(
            f"unknown preset {preset!r} for {geometry.L1}x{geometry.L2}; "
            f"shipped: {', '.join(sorted(known))}"
        )
    return RegionPartition(regions=known[preset], label=preset)


def _mask(spins) -> int:
    m = 0
    for s in spins:
        m |= 1 << s
    return m


def _cycles_within(region: tuple[int, ...], constraint_supports) -> list[int]:
    """Spin masks of cycles supported inside the region.

    A cycle is a spin set meeting every constraint support evenly. Each
    region spin becomes a GF(2) vector over constraints; kernel combinations
    are exactly the cycles.
    """
    vectors = []
    for s in region:
        row = 0
        for k, sup in enumerate(constraint_supports):
            if s in sup:
                row |= 1 << k
        vectors.append(row)
    combos = gf2.kernel_basis(vectors)
    cycles = []
    for c in combos:
        spin_mask = 0
        for i, s in enumerate(region):
            if c >> i & 1:
                spin_mask |= 1 << s
        cycles.append(spin_mask)
    return cycles


def region_winds(geometry: LatticeGeometry, region) -> bool:
    """Whether a region supports a noncontractible cycle of either lattice.

    Checks both cycle families: direct-lattice cycles (even overlap with
    every star) paired against the dual reference loops, and dual-lattice
    cycles (even overlap with every plaquette) paired against the direct
    reference loops. A region that supports neither kind of winding cycle
    is contractible on the torus.
    """
    region = tuple(sorted(region))
    direct_refs = (_mask(geometry.loop1_support), _mask(geometry.loop2_support))
    # Z loops winding each direction on the direct lattice: a row of
    # horizontal bonds winds direction 1, a column of vertical bonds
    # winds direction 2.
    dual_refs = (
        _mask(geometry.horizontal_bond(x, 0) for x in range(geometry.L1)),
        _mask(geometry.vertical_bond(0, y) for y in range(geometry.L2)),
    )
    for supports, refs in (
        (geometry.star_supports, direct_refs),
        (geometry.plaquette_supports, dual_refs),
    ):
        for cycle in _cycles_within(region, supports):
            if any((cycle & ref).bit_count() % 2 for ref in refs):
                return True
    return False


def complement_is_deformable(geometry: LatticeGeometry, region) -> bool:
    """Whether the complement supports winding X loops of all three classes.

    When it does, every sector-changing loop operator can be deformed off
    the region by stabilizer moves, which forces the four sector states to
    share their reduced matrix on the region.
    """
    region = set(region)
    rest = tuple(s for s in range(geometry.n_spins) if s not in region)
    zrefs = (
        _mask(geometry.horizontal_bond(x, 0) for x in range(geometry.L1)),
        _mask(geometry.vertical_bond(0, y) for y in range(geometry.L2)),
    )
    # Classify each dual cycle in the complement by its winding parities
    # against the two Z reference loops; need the classes to span all of
    # (1,0), (0,1), (1,1).
    classes = []
    for cycle in _cycles_within(rest, geometry.plaquette_supports):
        w = ((cycle & zrefs[0]).bit_count() % 2) | (((cycle & zrefs[1]).bit_count() % 2) << 1)
        if w:
            classes.append(w)
    return gf2.rank(classes) == 2


def geometry_to_json(geometry: LatticeGeometry) -> str:
    """Serialize the geometry as JSON arrays of spin indices."""
    return json.dumps(
        {
            "L1": geometry.L1,
            "L2": geometry.L2,
            "n_spins": geometry.n_spins,
            "star_supports": [list(s) for s in geometry.star_supports],
            "plaquette_supports": [list(p) for p in geometry.plaquette_supports],
            "horizontal_spins": list(geometry.horizontal_spins),
            "vertical_spins": list(geometry.vertical_spins),
            "loop1_support": list(geometry.loop1_support),
            "loop2_support": list(geometry.loop2_support),
        },
        indent=2,
    )


def partition_to_json(partition: RegionPartition) -> str:
    return json.dumps(
        {"label": partition.label, "regions": [list(r) for r in partition.regions]},
        indent=2,
    )
