"""Molecule parameter records and the built-in presets."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class MoleculeSpec:
    """Rigid-rotor parameters of a polar asymmetric top.

    Rotational constants in MHz, ordered ``B_z > B_y > B_x > 0`` (the
    dipole lies along the molecular z-axis, the axis of smallest moment
    of inertia).  ``mu`` is the permanent dipole in Debye and the
    ``alpha_**`` are polarizability volumes in Angstrom^3.
    """

    name: str
    B_x: float
    B_y: float
    B_z: float
    mu: float
    alpha_xx: float
    alpha_yy: float
    alpha_zz: float

    def __post_init__(self) -> None:
        if not (self.B_z > self.B_y > self.B_x > 0.0):
            raise ValueError(
                f"rotational constants must satisfy B_z > B_y > B_x > 0, "
                f"got B_x={self.B_x}, B_y={self.B_y}, B_z={self.B_z} MHz"
            )
        if self.mu < 0.0:
            raise ValueError(f"dipole moment must be >= 0, got {self.mu} D")
        if min(self.alpha_xx, self.alpha_yy, self.alpha_zz) <= 0.0:
            raise ValueError("polarizability volumes must be > 0")

    @property
    def alpha_zx(self) -> float:
        """Polarizability anisotropy alpha_zz - alpha_xx (A^3)."""
        return self.alpha_zz - self.alpha_xx

    @property
    def alpha_yx(self) -> float:
        """Polarizability anisotropy alpha_yy - alpha_xx (A^3)."""
        return self.alpha_yy - self.alpha_xx


BENZONITRILE = MoleculeSpec(
    name="benzonitrile",
    B_x=1214.0,
    B_y=1547.0,
    B_z=5655.0,
    mu=4.515,
    alpha_xx=7.49,
    alpha_yy=13.01,
    alpha_zz=18.64,
)

PRESETS = {"benzonitrile": BENZONITRILE}

_FILE_KEYS = {
    "name": str,
    "B_x_MHz": float,
    "B_y_MHz": float,
    "B_z_MHz": float,
    "mu_D": float,
    "alpha_xx_A3": float,
    "alpha_yy_A3": float,
    "alpha_zz_A3": float,
}


def molecule_from_file(path: str | Path) -> MoleculeSpec:
    """Read a molecule from a plain-text key-value file.

    One ``key = value`` pair per line; ``#`` starts a comment.  The
    required keys are exactly name, B_x_MHz, B_y_MHz, B_z_MHz, mu_D,
    alpha_xx_A3, alpha_yy_A3 and alpha_zz_A3.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FILE_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    missing = sorted(set(_FILE_KEYS) - set(raw))
    if missing:
        raise ValueError(f"{path}: missing keys: {', '.join(missing)}")
    return MoleculeSpec(
        name=raw["name"],
        B_x=float(raw["B_x_MHz"]),
        B_y=float(raw["B_y_MHz"]),
        B_z=float(raw["B_z_MHz"]),
        mu=float(raw["mu_D"]),
        alpha_xx=float(raw["alpha_xx_A3"]),
        alpha_yy=float(raw["alpha_yy_A3"]),
        alpha_zz=float(raw["alpha_zz_A3"]),
    )


def get_molecule(name: str) -> MoleculeSpec:
    """Look up a built-in preset by name."""
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown molecule preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
