"""Analytic toric-code ground states and the group-theoretic entropy rule.

The model is H = -U sum_p B_p - J sum_s A_s with A_s the product of sigma^x
on the four bonds of site s and B_p the product of sigma^z around plaquette
p. All terms commute, the ground energy is -L1*L2*(U+J), and the ground
space is four-fold degenerate on the torus.

Products of star operators form a group G of order 2^(L1*L2 - 1); the one
relation is that the product of all stars is the identity. The sector (0,0)
ground state is the uniform superposition |G|^(-1/2) sum_g g|up...up>, and
the other three sectors are reached by the two noncontractible X loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import in_span, rank, row_reduce
from .lattice import LatticeGeometry
from .pauli import PauliOperator, pauli_x

__all__ = [
    "FullBasis",
    "StateVector",
    "StabilizerGroupInfo",
    "enumerate_group",
    "ground_state",
    "loop_operator",
    "apply_pauli",
    "expectation",
    "analytic_region_entropy",
    "save_state",
    "load_state",
]


@dataclass(frozen=True)
class FullBasis:
    """The complete 2^N computational basis."""

    n_spins: int

    @property
    def dimension(self) -> int:
        return 1 << self.n_spins


@dataclass
class StateVector:
    """Dense amplitudes over a basis.

    ``basis`` is either a FullBasis or a sector basis object exposing
    ``n_spins``, ``dimension``, and sorted ``kept_indices``.
    """

    amplitudes: np.ndarray
    basis: object

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise ValueError("amplitude length does not match basis dimension")
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state is not normalized: |psi| = {norm!r}")

    @property
    def n_spins(self) -> int:
        return self.basis.n_spins

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.basis)


def same_basis(a: StateVector, b: StateVector) -> bool:
    if a.basis is b.basis:
        return True
    if isinstance(a.basis, FullBasis) and isinstance(b.basis, FullBasis):
        return a.basis.n_spins == b.basis.n_spins
    ka = getattr(a.basis, "kept_indices", None)
    kb = getattr(b.basis, "kept_indices", None)
    if ka is None or kb is None:
        return False
    return a.basis.n_spins == b.basis.n_spins and np.array_equal(ka, kb)


@dataclass(frozen=True)
class StabilizerGroupInfo:
    generators: tuple[PauliOperator, ...]
    gf2_rank: int
    group_order: int


def enumerate_group(generators: Sequence[PauliOperator]) -> StabilizerGroupInfo:
    """Rank and order of the group generated by pure-X strings.

    The generators commute exactly when they are pure X, so the group is
    the GF(2) span of their x masks and its order is 2^rank.
    """
    for g in generators:
        if g.z_mask != 0 or g.phase_exp != 0:
            raise ValueError(f"generator is not a plain X string: {g}")
    r = rank(g.x_mask for g in generators)
    return StabilizerGroupInfo(
        generators=tuple(generators),
        gf2_rank=r,
        group_order=1 << r,
    )


def star_operators(geometry: LatticeGeometry) -> tuple[PauliOperator, ...]:
    n = geometry.n_spins
    return tuple(pauli_x(n, sup) for sup in geometry.star_supports)


def plaquette_operators(geometry: LatticeGeometry) -> tuple[PauliOperator, ...]:
    from .pauli import pauli_z

    n = geometry.n_spins
    return tuple(pauli_z(n, sup) for sup in geometry.plaquette_supports)


def loop_operator(geometry: LatticeGeometry, direction: int) -> PauliOperator:
    """Noncontractible X loop winding the given torus direction.

    The loop flips all spins along a cycle of the dual lattice, so it
    commutes with every star and plaquette but is not itself a product of
    stars; it connects the four degenerate sectors.
    """
    if direction == 1:
        support = geometry.loop1_support
    elif direction == 2:
        support = geometry.loop2_support
    else:
        raise ValueError("direction must be 1 or 2")
    return pauli_x(geometry.n_spins, support)


def _group_masks(geometry: LatticeGeometry) -> list[int]:
    """All 2^rank star-group elements as basis-flip masks."""
    basis = row_reduce(
        sum(1 << s for s in sup) for sup in geometry.star_supports
    )
    elements = [0]
    for b in basis:
        elements += [e ^ b for e in elements]
    return elements


def ground_state(geometry: LatticeGeometry, sector: tuple[int, int] = (0, 0)) -> StateVector:
    """Analytic ground state of one topological sector.

    The state is the uniform superposition over the star-group orbit of the
    all-up configuration, shifted by the winding loops selected by
    ``sector = (w1, w2)``. All amplitudes on the orbit equal
    ``group_order**-0.5`` and the four sectors are orthonormal.
    """
    w1, w2 = sector
    if w1 not in (0, 1) or w2 not in (0, 1):
        raise ValueError("sector labels must be bits")
    shift = 0
    if w1:
        shift ^= sum(1 << s for s in geometry.loop1_support)
    if w2:
        shift ^= sum(1 << s for s in geometry.loop2_support)
    elements = _group_masks(geometry)
    amps = np.zeros(1 << geometry.n_spins, dtype=np.complex128)
    amps[np.fromiter((e ^ shift for e in elements), dtype=np.int64)] = 1.0 / np.sqrt(
        len(elements)
    )
    return StateVector(amps, FullBasis(geometry.n_spins))


def apply_pauli(op: PauliOperator, state: StateVector) -> np.ndarray:
    """Amplitudes of op|state| in the state's own basis.

    For a sector basis, weight sent outside the sector is dropped, so the
    result is the in-sector projection of the image.
    """
    amps = state.amplitudes
    phase = (1 + 0j, 1j, -1 + 0j, -1j)[op.phase_exp]
    kept = getattr(state.basis, "kept_indices", None)
    if kept is None:
        idx = np.arange(amps.size, dtype=np.int64)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & op.z_mask) & 1)
        out = np.zeros_like(amps)
        out[idx ^ op.x_mask] = phase * signs * amps
        return out
    idx = np.asarray(kept, dtype=np.int64)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & op.z_mask) & 1)
    tgt = idx ^ op.x_mask
    pos = np.searchsorted(idx, tgt)
    pos_clipped = np.minimum(pos, idx.size - 1)
    valid = idx[pos_clipped] == tgt
    out = np.zeros_like(amps)
    out[pos_clipped[valid]] = (phase * signs * amps)[valid]
    return out


def expectation(state: StateVector, op: PauliOperator) -> complex:
    """Exact <psi|op|psi> via basis application."""
    if op.n_spins != state.n_spins:
        raise ValueError("operator and state act on different spin counts")
    return complex(np.vdot(state.amplitudes, apply_pauli(op, state)))


def analytic_region_entropy(geometry: LatticeGeometry, region) -> float:
    """Entanglement entropy of a ground-state region, in bits, from GF(2).

    The reduced matrix of a stabilizer ground state is proportional to a
    projector, so the entropy is the base-2 log of its flat rank:
    rank(G) - d_A - d_B bits, where d_A counts independent group elements
    supported inside the region and d_B the same for the complement. Both
    counts reduce to ranks of the restricted star masks, giving
    S = rank(masks|region) + rank(masks|complement) - rank(masks).
    The value holds for every Renyi index and every sector.
    """
    region = set(region)
    if not region:
        raise ValueError("region is empty")
    if len(region) >= geometry.n_spins:
        raise ValueError("region must be a proper subset of the spins")
    if any(not 0 <= s < geometry.n_spins for s in region):
        raise ValueError("region contains an out-of-range spin")
    region_mask = sum(1 << s for s in region)
    rest_mask = ((1 << geometry.n_spins) - 1) ^ region_mask
    masks = [sum(1 << s for s in sup) for sup in geometry.star_supports]
    r = rank(masks)
    r_in = rank(m & region_mask for m in masks)
    r_out = rank(m & rest_mask for m in masks)
    return float(r_in + r_out - r)


def loop_in_star_group(geometry: LatticeGeometry, direction: int) -> bool:
    """GF(2) membership of a winding loop in the star group (always false)."""
    masks = [sum(1 << s for s in sup) for sup in geometry.star_supports]
    loop = loop_operator(geometry, direction)
    return in_span(masks, loop.x_mask)


def save_state(path, state: StateVector) -> None:
    """Binary amplitude dump for regression comparisons."""
    kept = getattr(state.basis, "kept_indices", None)
    if kept is None:
        np.savez(path, amplitudes=state.amplitudes, n_spins=state.n_spins)
    else:
        np.savez(
            path,
            amplitudes=state.amplitudes,
            n_spins=state.n_spins,
            kept_indices=np.asarray(kept, dtype=np.int64),
        )


def load_state(path) -> StateVector:
    with np.load(path) as data:
        n = int(data["n_spins"])
        amps = data["amplitudes"]
        if "kept_indices" in data:
            from .ed import SectorBasis

            basis = SectorBasis.from_kept(n, data["kept_indices"])
            return StateVector(amps, basis)
        return StateVector(amps, FullBasis(n))
