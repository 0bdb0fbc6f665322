"""Symmetrized pairs of single-particle packets and their side statistics.

The pair state built from packets A and B is

    Psi(x1, x2) = C [psi_A(x1) psi_B(x2) + sign psi_B(x1) psi_A(x2)]

with sign +1 (symmetric) or -1 (antisymmetric) and the exact constant

    C = 1 / sqrt(2 (1 + sign |s|^2)),    s = <psi_A|psi_B>.

The familiar 1/sqrt(2) is the s = 0 limit of this.

Integrating |Psi|^2 over the four side quadrants never needs a 2D
quadrature: with T_X, R_X the single-particle side masses and I_+/- the
half-line overlaps of conj(psi_A) psi_B,

    p02 = C^2 (2 T_A T_B + sign 2 |I_+|^2)          both positive
    p20 = C^2 (2 R_A R_B + sign 2 |I_-|^2)          both negative
    p11 = C^2 (2 T_A R_B + 2 R_A T_B + sign 4 Re(I_+ conj(I_-)))

and I_+ + I_- = s by the shared quadrature split.  The direct 2D
integration is kept as an oracle to guard the factorized path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BudgetExceededError,
    ConsistencyError,
    PauliDegeneracyError,
    PrematureMeasurementError,
)
from .grid import (
    Wavefunction,
    half_line_overlap,
    inner_product,
    probability_on_side,
)

BOSON = 1
FERMION = -1

PAULI_GUARD = 1e-9
SUM_RULE_TOL = 1e-6
PARTITION_TOL = 1e-12
_NORM_TOL = 1e-6
_ORACLE_MAX_POINTS = 4096
_ORACLE_BLOCK = 256


@dataclass(frozen=True, eq=False)
class SymmetrizedPair:
    """Two packets, an exchange sign, and the derived normalization."""

    psi_a: Wavefunction
    psi_b: Wavefunction
    sign: int
    s: complex
    norm_const: float


@dataclass(frozen=True)
class JointStats:
    """Side-quadrant probabilities and the overlap diagnostics behind them."""

    p20: float
    p02: float
    p11: float
    a: float
    s: complex
    i_plus: complex
    i_minus: complex
    t_a: float
    r_a: float
    t_b: float
    r_b: float
    sum_check: float

    @property
    def s_abs(self) -> float:
        return abs(self.s)


def make_pair(psi_a: Wavefunction, psi_b: Wavefunction, sign: int) -> SymmetrizedPair:
    """Symmetrize two unit-normalized packets on the same grid and time.

    Raises PauliDegeneracyError for the antisymmetric sign when
    1 - |s|^2 <= 1e-9: the pair state vanishes and no statistics exist.
    """
    if sign not in (BOSON, FERMION):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    for name, psi in (("A", psi_a), ("B", psi_b)):
        drift = abs(psi.norm_sq() - 1.0)
        if drift > _NORM_TOL:
            raise ConsistencyError(
                f"packet {name} is not unit-normalized (|norm^2 - 1| = {drift:.3g})"
            )
    s = inner_product(psi_a, psi_b)
    overlap_sq = abs(s) ** 2
    if sign == FERMION and not (1.0 - overlap_sq) > PAULI_GUARD:
        raise PauliDegeneracyError(
            f"antisymmetric pair degenerate: 1 - |s|^2 = {1.0 - overlap_sq:.3g} "
            f"is within the exclusion guard {PAULI_GUARD}"
        )
    norm_const = 1.0 / np.sqrt(2.0 * (1.0 + sign * overlap_sq))
    return SymmetrizedPair(psi_a=psi_a, psi_b=psi_b, sign=sign, s=s, norm_const=float(norm_const))


def _grid_indices(pair: SymmetrizedPair, x) -> np.ndarray:
    grid = pair.psi_a.grid
    arr = np.asarray(x, dtype=float)
    idx = np.rint((arr + grid.half_width) / grid.dx).astype(np.intp)
    if np.any(idx < 0) or np.any(idx >= grid.points):
        raise ValueError("position outside the grid box")
    if np.any(np.abs(grid.x[idx] - arr) > 0.25 * grid.dx):
        raise ValueError("positions must coincide with grid samples")
    return idx


def joint_density(pair: SymmetrizedPair, x1, x2):
    """|Psi(x1, x2)|^2 at grid samples; x1 and x2 broadcast like arrays.

    The cross term couples the two coordinates through
    c(x) = conj(psi_A(x)) psi_B(x):

        |Psi|^2 = C^2 [ dA(x1) dB(x2) + dB(x1) dA(x2)
                        + sign 2 Re(c(x1) conj(c(x2))) ]
    """
    i1 = _grid_indices(pair, x1)
    i2 = _grid_indices(pair, x2)
    va, vb = pair.psi_a.values, pair.psi_b.values
    da = np.abs(va) ** 2
    db = np.abs(vb) ** 2
    cross = np.conj(va) * vb
    nc2 = pair.norm_const**2
    dens = nc2 * (
        da[i1] * db[i2]
        + db[i1] * da[i2]
        + pair.sign * 2.0 * (cross[i1] * np.conj(cross[i2])).real
    )
    if np.isscalar(x1) and np.isscalar(x2):
        return float(dens)
    return dens


def joint_probabilities(
    pair: SymmetrizedPair,
    boundary: float = 0.0,
    barrier=None,
    barrier_amplitude_max: Optional[float] = None,
    lobe_sigmas: Optional[float] = None,
) -> JointStats:
    """Quadrant probabilities from the factorized 1D integrals.

    When `barrier` is given, both packets must satisfy the measurement
    criterion (cleared the barrier, lobes detached from the boundary),
    with the propagator's default thresholds unless overridden here;
    without a barrier the caller vouches for the timing.
    """
    if barrier is not None:
        from .propagator import (
            DEFAULT_BARRIER_AMPLITUDE_MAX,
            DEFAULT_LOBE_SIGMAS,
            measurement_ready,
        )

        amp_max = (
            DEFAULT_BARRIER_AMPLITUDE_MAX
            if barrier_amplitude_max is None
            else barrier_amplitude_max
        )
        sigmas = DEFAULT_LOBE_SIGMAS if lobe_sigmas is None else lobe_sigmas
        for name, psi in (("A", pair.psi_a), ("B", pair.psi_b)):
            if not measurement_ready(psi, barrier, boundary, amp_max, sigmas):
                raise PrematureMeasurementError(
                    f"packet {name} has not cleared the barrier region; "
                    f"measuring now would split lobes still interacting"
                )
    t_a = probability_on_side(pair.psi_a, "positive", boundary)
    r_a = probability_on_side(pair.psi_a, "negative", boundary)
    t_b = probability_on_side(pair.psi_b, "positive", boundary)
    r_b = probability_on_side(pair.psi_b, "negative", boundary)
    i_plus = half_line_overlap(pair.psi_a, pair.psi_b, "positive", boundary)
    i_minus = half_line_overlap(pair.psi_a, pair.psi_b, "negative", boundary)
    if abs((i_plus + i_minus) - pair.s) > PARTITION_TOL:
        raise ConsistencyError(
            f"half-line overlaps do not partition the full overlap: "
            f"|I+ + I- - s| = {abs(i_plus + i_minus - pair.s):.3g}"
        )
    sign = pair.sign
    nc2 = pair.norm_const**2
    p02 = nc2 * (2.0 * t_a * t_b + sign * 2.0 * abs(i_plus) ** 2)
    p20 = nc2 * (2.0 * r_a * r_b + sign * 2.0 * abs(i_minus) ** 2)
    p11 = nc2 * (
        2.0 * t_a * r_b
        + 2.0 * r_a * t_b
        + sign * 4.0 * (i_plus * np.conj(i_minus)).real
    )
    sum_check = (p20 + p02) + p11
    if abs(sum_check - 1.0) > SUM_RULE_TOL:
        raise ConsistencyError(
            f"quadrant sum rule violated: p20 + p02 + p11 = {sum_check!r}"
        )
    return JointStats(
        p20=p20,
        p02=p02,
        p11=p11,
        a=0.5 * (p20 + p02),
        s=pair.s,
        i_plus=i_plus,
        i_minus=i_minus,
        t_a=t_a,
        r_a=r_a,
        t_b=t_b,
        r_b=r_b,
        sum_check=sum_check,
    )


def quadrant_quadrature_oracle(
    pair: SymmetrizedPair,
    boundary: float = 0.0,
    max_points: int = _ORACLE_MAX_POINTS,
) -> JointStats:
    """Quadrant probabilities by direct 2D integration of `joint_density`.

    O(G^2) work, evaluated in row blocks so memory stays flat; refuses
    grids beyond `max_points`.  Exists purely to guard the factorized
    path in `joint_probabilities`.
    """
    grid = pair.psi_a.grid
    if grid.points > max_points:
        raise BudgetExceededError(
            f"2D quadrature oracle limited to {max_points} grid points, got {grid.points}"
        )
    i0 = grid.split_index(boundary)
    x = grid.x
    w2 = grid.dx * grid.dx
    p_nn = 0.0  # x1 < boundary, x2 < boundary
    p_pp = 0.0
    p_mixed = 0.0
    for start in range(0, grid.points, _ORACLE_BLOCK):
        stop = min(start + _ORACLE_BLOCK, grid.points)
        block = joint_density(pair, x[start:stop, None], x[None, :])
        neg = float(np.sum(block[:, :i0]))
        pos = float(np.sum(block[:, i0:]))
        rows_neg = max(min(i0 - start, stop - start), 0)
        neg_neg = float(np.sum(block[:rows_neg, :i0]))
        pos_pos = float(np.sum(block[rows_neg:, i0:]))
        p_nn += neg_neg
        p_pp += pos_pos
        p_mixed += (neg + pos) - neg_neg - pos_pos
    p20 = p_nn * w2
    p02 = p_pp * w2
    p11 = p_mixed * w2
    i_plus = half_line_overlap(pair.psi_a, pair.psi_b, "positive", boundary)
    i_minus = half_line_overlap(pair.psi_a, pair.psi_b, "negative", boundary)
    return JointStats(
        p20=p20,
        p02=p02,
        p11=p11,
        a=0.5 * (p20 + p02),
        s=pair.s,
        i_plus=i_plus,
        i_minus=i_minus,
        t_a=probability_on_side(pair.psi_a, "positive", boundary),
        r_a=probability_on_side(pair.psi_a, "negative", boundary),
        t_b=probability_on_side(pair.psi_b, "positive", boundary),
        r_b=probability_on_side(pair.psi_b, "negative", boundary),
        sum_check=(p20 + p02) + p11,
    )


def dump_joint_density_csv(pair: SymmetrizedPair, out, max_points: int = 256) -> None:
    """Write x1, x2, density rows, downsampled to at most max_points per axis."""
    grid = pair.psi_a.grid
    stride = max(1, -(-grid.points // max_points))
    xs = grid.x[::stride]
    dens = joint_density(pair, xs[:, None], xs[None, :])
    out.write("x1,x2,density\n")
    for i, x1 in enumerate(xs):
        row = dens[i]
        for j, x2 in enumerate(xs):
            out.write(f"{x1:.12g},{x2:.12g},{row[j]:.12g}\n")
