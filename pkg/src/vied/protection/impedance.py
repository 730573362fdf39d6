"""Apparent-impedance measurement and operating-zone geometry.

Six measuring loops in fixed order: three ground loops compensated for
residual current (Zag = VA / (IA + k0*3I0) and rotations) and three
phase loops (Zab = (VA-VB) / (IA-IB) and rotations).  A loop whose
denominator current is below the configured floor is marked not
measurable, which keeps load-current noise from producing
divide-by-near-zero impedances during no-fault operation.

All zone boundaries are closed: a point on the rim is inside, so a
bolted close-in fault with Z ~ 0 operates the mho (the origin lies on
its circle).
"""

from __future__ import annotations

from .settings import PdisSettings, QuadSettings

LOOPS = ("AG", "BG", "CG", "AB", "BC", "CA")


def apparent_impedances(
    phasors,
    k0: complex,
    current_floor_a: float,
) -> dict[str, complex | None]:
    """Loop impedances in primary ohms; None marks a non-measurable loop."""
    ia = phasors.i_a
    ib = phasors.i_b
    ic = phasors.i_c
    va = phasors.v_a
    vb = phasors.v_b
    vc = phasors.v_c
    res = k0 * (ia + ib + ic)  # k0 * 3I0
    out: dict[str, complex | None] = {}
    for name, v, den in (
        ("AG", va, ia + res),
        ("BG", vb, ib + res),
        ("CG", vc, ic + res),
        ("AB", va - vb, ia - ib),
        ("BC", vb - vc, ib - ic),
        ("CA", vc - va, ic - ia),
    ):
        out[name] = v / den if abs(den) >= current_floor_a else None
    return out


def zone_contains(
    characteristic: str,
    reach_impedance: complex,
    z: complex,
    quad: QuadSettings | None = None,
) -> bool:
    """True when z lies inside (or on) the configured zone."""
    zr = reach_impedance
    if characteristic == "impedance":
        return abs(z) <= abs(zr)
    if characteristic == "mho":
        half = 0.5 * zr
        return abs(z - half) <= abs(half)
    if characteristic == "reactance":
        return z.imag <= zr.imag
    if characteristic == "quadrilateral":
        if quad is None:
            raise ValueError("quadrilateral characteristic requires quad settings")
        return (
            0.0 <= z.imag <= quad.x_reach_ohm
            and -quad.r_reach_ohm / 8.0 <= z.real <= quad.r_reach_ohm
        )
    raise ValueError(f"unknown characteristic {characteristic!r}")


def zone_of(settings: PdisSettings, z: complex) -> bool:
    return zone_contains(
        settings.characteristic, settings.reach_impedance, z, settings.quad
    )
