"""Symmetry-adapted angular basis for an asymmetric top in parallel fields.

With both fields along the laboratory Z-axis the good quantum numbers
are M (taken non-negative; -M blocks are degenerate copies) and the
parity of K.  For M = 0 the reflection parity on planes containing the
fields splits each K-parity set further in two.  The basis functions
are symmetric-top kets |J K M>:

* M != 0: plain signed-K kets with K of the block's parity,
* M = 0, K = 0: |J 0 0>, only in the reflection-even, K-even block,
* M = 0, K > 0: (|J K 0> + p |J -K 0>)/sqrt(2) with the phase
  p = (-1)^K for reflection-even blocks and p = (-1)^(K+1) for
  reflection-odd ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class SymmetryBlock:
    """One irreducible representation of the parallel-field symmetry group."""

    M: int
    k_parity: str
    sigmaZ_parity: Optional[str] = None

    def __post_init__(self) -> None:
        if self.M < 0:
            raise ValueError(f"M must be >= 0 (blocks are degenerate in |M|), got {self.M}")
        if self.k_parity not in (EVEN, ODD):
            raise ValueError(f"k_parity must be 'even' or 'odd', got {self.k_parity!r}")
        if self.M == 0:
            if self.sigmaZ_parity not in (EVEN, ODD):
                raise ValueError("M=0 blocks require sigmaZ_parity 'even' or 'odd'")
        elif self.sigmaZ_parity is not None:
            raise ValueError("sigmaZ_parity is only meaningful for M=0 blocks")

    def __str__(self) -> str:
        if self.M == 0:
            return f"M=0,K-{self.k_parity},sigmaZ-{self.sigmaZ_parity}"
        return f"M={self.M},K-{self.k_parity}"


@dataclass(frozen=True)
class BasisFunction:
    """A single basis ket.

    For M = 0 symmetrized pairs ``K`` is the positive representative and
    ``combo_sign`` the coefficient sign on |J -K 0> (the 1/sqrt(2)
    normalization is implicit); it is None for plain kets and K = 0.
    For M != 0, ``K`` is signed and ``combo_sign`` is None.
    """

    J: int
    K: int
    M: int
    combo_sign: Optional[int] = None

    def __post_init__(self) -> None:
        if self.J < 0 or abs(self.K) > self.J or abs(self.M) > self.J:
            raise ValueError(f"invalid quantum numbers J={self.J}, K={self.K}, M={self.M}")
        if self.combo_sign not in (None, 1, -1):
            raise ValueError(f"combo_sign must be +1, -1 or None, got {self.combo_sign}")

    def primitives(self) -> tuple[tuple[int, int, float], ...]:
        """Expansion into signed-K kets as ``(J, K, coefficient)`` tuples."""
        if self.combo_sign is None:
            return ((self.J, self.K, 1.0),)
        inv_sqrt2 = 0.7071067811865476
        return (
            (self.J, self.K, inv_sqrt2),
            (self.J, -self.K, self.combo_sign * inv_sqrt2),
        )


@dataclass(frozen=True)
class Basis:
    """Ordered basis of one symmetry block up to a truncation J_max.

    Ordering is ascending in J, then ascending in (signed, for M != 0)
    K; the index <-> function mapping is bijective and deterministic.
    """

    block: SymmetryBlock
    J_max: int
    functions: tuple[BasisFunction, ...]

    @property
    def dim(self) -> int:
        return len(self.functions)

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self) -> Iterator[BasisFunction]:
        return iter(self.functions)

    def dump_text(self) -> str:
        """One function per line: J, K, M, combo_sign."""
        lines = ["# J K M combo_sign"]
        for f in self.functions:
            sign = "none" if f.combo_sign is None else f"{f.combo_sign:+d}"
            lines.append(f"{f.J} {f.K} {f.M} {sign}")
        return "\n".join(lines) + "\n"


def _combo_phase(block: SymmetryBlock, K: int) -> int:
    base = (-1) ** K
    return base if block.sigmaZ_parity == EVEN else -base


def build_basis(block: SymmetryBlock, J_max: int) -> Basis:
    """Enumerate every allowed (J, K) with J <= J_max for the block."""
    if J_max < block.M:
        raise ValueError(f"J_max={J_max} is below the block's M={block.M}")
    parity = 0 if block.k_parity == EVEN else 1
    funcs: list[BasisFunction] = []
    if block.M == 0:
        for J in range(J_max + 1):
            for K in range(parity, J + 1, 2):
                if K == 0:
                    # (|J00> - |J00>)/sqrt2 vanishes in the odd block
                    if _combo_phase(block, 0) == 1:
                        funcs.append(BasisFunction(J, 0, 0, None))
                else:
                    funcs.append(BasisFunction(J, K, 0, _combo_phase(block, K)))
    else:
        for J in range(block.M, J_max + 1):
            start = -J if (-J) % 2 == parity else -J + 1
            for K in range(start, J + 1, 2):
                funcs.append(BasisFunction(J, K, block.M, None))
    return Basis(block=block, J_max=J_max, functions=tuple(funcs))


def basis_dimension(block: SymmetryBlock, J_max: int) -> int:
    """Number of basis functions, by direct counting."""
    if J_max < block.M:
        raise ValueError(f"J_max={J_max} is below the block's M={block.M}")
    parity = 0 if block.k_parity == EVEN else 1
    count = 0
    if block.M == 0:
        include_k0 = block.sigmaZ_parity == EVEN and parity == 0
        for J in range(J_max + 1):
            n_pos = len(range(max(parity, 2 - parity), J + 1, 2))
            count += n_pos + (1 if include_k0 else 0)
    else:
        for J in range(block.M, J_max + 1):
            count += sum(1 for K in range(-J, J + 1) if K % 2 == parity)
    return count
