"""Coarse algebraic classification from the Weyl scalars in an adapted frame.

Only the information visible from which Ψ's vanish is used, so types II and D
are reported together and a nonzero Ψ0 or Ψ1 means the frame is not aligned
with a repeated principal null direction.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class PetrovLabel(str, enum.Enum):
    GENERAL_OR_UNALIGNED = "GENERAL_OR_UNALIGNED"
    II_OR_D = "II_OR_D"
    III = "III"
    N = "N"
    ZERO = "ZERO"


@dataclass(frozen=True)
class PetrovResult:
    label: PetrovLabel
    threshold: float
    magnitudes: tuple


def classify(psi, tol_rel: float = 1e-7) -> PetrovResult:
    """Classify from (Ψ0, ..., Ψ4) with threshold tol_rel * max(1, max |Ψ|)."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (5,):
        raise ValueError("expected five Weyl scalars")
    mags = np.abs(psi)
    thr = tol_rel * max(1.0, float(mags.max()))
    small = mags < thr
    if not (small[0] and small[1]):
        label = PetrovLabel.GENERAL_OR_UNALIGNED
    elif not small[2]:
        label = PetrovLabel.II_OR_D
    elif not small[3]:
        label = PetrovLabel.III
    elif not small[4]:
        label = PetrovLabel.N
    else:
        label = PetrovLabel.ZERO
    return PetrovResult(label, thr, tuple(float(m) for m in mags))
