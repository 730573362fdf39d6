"""Shared helpers for building phasor sets in protection tests."""

import cmath

import pytest

from vied.dsp import PhasorSet

NOMINAL_V = 500e3 / 3**0.5  # 288675.13 V phase-ground RMS


def polar(mag, deg):
    return cmath.rect(mag, cmath.pi * deg / 180.0)


def make_phasors(
    ia=0j,
    ib=0j,
    ic=0j,
    i_n=None,
    va=None,
    vb=None,
    vc=None,
    v_n=None,
    frequency=60.0,
    sample_index=0,
):
    """Balanced nominal voltages unless overridden; neutral defaults to sums."""
    if va is None:
        va = polar(NOMINAL_V, 0)
    if vb is None:
        vb = polar(NOMINAL_V, -120)
    if vc is None:
        vc = polar(NOMINAL_V, 120)
    if i_n is None:
        i_n = ia + ib + ic
    if v_n is None:
        v_n = va + vb + vc
    return PhasorSet(ia, ib, ic, i_n, va, vb, vc, v_n, frequency, sample_index)


@pytest.fixture
def phasors():
    return make_phasors
