"""GNVW index computation and constructive block factorization.

The index of a banded unitary U is the Hilbert-Schmidt imbalance of its two
off-corner blocks, ind(U) = |U(-,+)|^2 - |U(+,-)|^2, an integer invariant
that is additive under products and equals k on the shift S^k.

For index-zero operators this module builds the explicit product U = V W
where W is block diagonal on the grid offset by -L and V on the grid at 0,
both with blocks of size 2L.  Each W block conjugates the compression of
U* P U on a window back to the half-space projection P; V = U W* then
commutes with every shifted half-space projection, which forces it onto the
aligned block grid.  End-periodic operators additionally split as (finite
perturbation of the identity) x (periodic part) via the background
retraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Dict, Optional

import numpy as np

from .errors import NumericalError, ValidationError
from .matutil import haar_unitary, polar_unitary, unitary_defect
from .operators import (CHECK_TOL, EndPeriodicOperator, Operator,
                        PeriodicBandOperator, _as_end_periodic, adjoint,
                        block_diagonal, corner_data, delta_embed, embed_finite,
                        identity, make_shift, max_entry_difference, multiply,
                        propagation, require_unitary, unitarity_residual)

# default acceptance tolerance on the index integer deviation
INDEX_TOL = 1e-6
# blocks whose unitarity defect is in (SNAP_TOL, HARD_TOL] get polar-projected
SNAP_TOL = 1e-12
HARD_TOL = 1e-6


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class IndexReport:
    """Index value with its consistency diagnostics.

    raw is the corner-block Hilbert-Schmidt imbalance, rounded its nearest
    integer, and trace_check the same quantity recomputed independently as
    the trace of P - U* P U over its finitely supported diagonal.
    """
    raw: float
    rounded: int
    deviation: float
    hs_minus_plus: float
    hs_plus_minus: float
    trace_check: float


@dataclass(frozen=True)
class DecompositionResult:
    v: Operator
    w: Operator
    block_size: int
    residual: float
    block_leakage: float


@dataclass(frozen=True)
class EndPeriodicSplit:
    finite_part: Operator
    periodic_part: PeriodicBandOperator
    residual: float

    @property
    def window(self) -> int:
        return getattr(self.finite_part, "patch_radius", 0)


def index(op: Operator, tol: float = INDEX_TOL) -> IndexReport:
    """Compute the index with corner sums, cross-checked against the trace
    of P - U* P U; rejects inputs whose raw value is not near an integer."""
    cd = corner_data(op)
    hs_mp = float(np.sum(np.abs(cd.minus_plus) ** 2))
    hs_pm = float(np.sum(np.abs(cd.plus_minus) ** 2))
    raw = hs_mp - hs_pm
    rounded = int(round(raw))
    deviation = abs(raw - rounded)

    k = max(op.prop_bound(), getattr(op, "patch_radius", 0), 1)
    trace = 0.0
    for j in range(-k, k):
        col = sum(abs(op.entry(i, j)) ** 2
                  for i in range(max(0, j - k), j + k + 1))
        trace += (1.0 if j >= 0 else 0.0) - col

    if deviation > tol:
        raise NumericalError(
            f"index {raw!r} deviates from an integer by {deviation:.3e} "
            f"(tolerance {tol:.3e}); input is not a clean banded unitary")
    return IndexReport(raw=raw, rounded=rounded, deviation=deviation,
                       hs_minus_plus=hs_mp, hs_plus_minus=hs_pm,
                       trace_check=trace)


def conjugating_unitary(q_window: np.ndarray, half: int) -> np.ndarray:
    """Unitary V with V* Q V = P on a window of size 2*half.

    q_window is the compression of an orthogonal projection Q to the span of
    e_{-half}..e_{half-1}; P is the half-space projection, diag(0..0, 1..1)
    on that window.  Columns 0..half-1 of the result span ker Q and columns
    half..2*half-1 span ran Q; any such choice satisfies the identity, so
    callers must only rely on the conjugation property.
    """
    q = np.asarray(q_window, dtype=complex)
    n = 2 * int(half)
    if q.shape != (n, n):
        raise ValidationError(f"window matrix must be {n}x{n}")
    herm = 0.5 * (q + q.conj().T)
    if np.max(np.abs(q - herm)) > HARD_TOL:
        raise NumericalError("window matrix is not Hermitian")
    eigenvalues, vectors = np.linalg.eigh(herm)
    if np.max(np.minimum(np.abs(eigenvalues), np.abs(eigenvalues - 1.0))) > HARD_TOL:
        raise NumericalError("window matrix is not a projection")
    rank = int(np.count_nonzero(eigenvalues > 0.5))
    if rank != half:
        raise NumericalError("trace mismatch")
    return vectors


def _projection_window(op: Operator, half: int) -> np.ndarray:
    """Compression of U* P U to the window [-half, half), P the projection
    onto indices >= 0.  Entry (r, c) is sum_{k>=0} conj(U[k, -half+r]) U[k, -half+c]."""
    reach = max(op.prop_bound(), getattr(op, "patch_radius", 0))
    cols = np.zeros((half + reach, 2 * half), dtype=complex)
    for k in range(0, half + reach):
        for c in range(2 * half):
            cols[k, c] = op.entry(k, -half + c)
    return cols.conj().T @ cols


def _block_scale(op: Operator) -> int:
    """Block half-size for the factorization: a common multiple of the
    propagation and the period, at least the patch radius."""
    base = _lcm(max(propagation(op), 1), op.period)
    radius = getattr(op, "patch_radius", 0)
    scale = base
    while scale < radius:
        scale += base
    return scale


def _window_block(op: Operator, start: int, size: int) -> np.ndarray:
    out = np.zeros((size, size), dtype=complex)
    for r in range(size):
        for c in range(size):
            out[r, c] = op.entry(start + r, start + c)
    return out


def _pattern_leakage(op: Operator, block: int) -> float:
    """Largest entry magnitude outside the block-diagonal pattern aligned at 0."""
    reach = op.prop_bound()

    def row_leak(source: Operator, i: int) -> float:
        lo = (i // block) * block
        worst = 0.0
        for j in range(i - reach, i + reach + 1):
            if not lo <= j < lo + block:
                worst = max(worst, abs(source.entry(i, j)))
        return worst

    if isinstance(op, PeriodicBandOperator):
        if block % op.period:
            raise ValidationError("block size must be a multiple of the period")
        return max((row_leak(op, i) for i in range(block)), default=0.0)
    worst = _pattern_leakage(op.background, block)
    for i in range(-op.patch_radius, op.patch_radius):
        worst = max(worst, row_leak(op, i))
    return worst


def _snap_block(m: np.ndarray) -> np.ndarray:
    """Project a nearly unitary block onto the unitary group; reject junk."""
    defect = unitary_defect(m)
    if defect <= SNAP_TOL:
        return m
    if defect > HARD_TOL:
        raise NumericalError(
            f"extracted block is far from unitary (defect {defect:.3e})")
    return polar_unitary(m)


def decompose(op: Operator, tol: float = 1e-9) -> DecompositionResult:
    """Factor an index-zero banded unitary as V W with both factors block
    diagonal: W on the grid offset by -L, V on the grid at 0, blocks 2L x 2L.

    Raises NumericalError("nonzero index") when the hypothesis fails, and
    a NumericalError when leakage or the reconstruction residual exceeds tol.
    """
    require_unitary(op, HARD_TOL)
    report = index(op)
    if report.rounded != 0:
        raise NumericalError("nonzero index")

    half = _block_scale(op)
    block = 2 * half

    if isinstance(op, PeriodicBandOperator):
        v_hat = conjugating_unitary(_projection_window(op, half), half)
        w_op: Operator = block_diagonal(-half, block, v_hat.conj().T)
    else:
        v_hat_bg = conjugating_unitary(
            _projection_window(op.background, half), half)
        v_hat_0 = conjugating_unitary(_projection_window(op, half), half)
        w_op = block_diagonal(-half, block, v_hat_bg.conj().T,
                              central={0: v_hat_0.conj().T})

    v_raw = multiply(op, adjoint(w_op))
    leakage = _pattern_leakage(v_raw, block)
    if leakage > tol:
        raise NumericalError(
            f"off-block leakage {leakage:.3e} exceeds tolerance {tol:.3e}")

    if isinstance(v_raw, PeriodicBandOperator):
        if block % v_raw.period:
            raise NumericalError("product period does not fit the block grid")
        v_op = block_diagonal(0, block, _snap_block(_window_block(v_raw, 0, block)))
    else:
        bg_block = _snap_block(_window_block(v_raw.background, 0, block))
        radius = v_raw.patch_radius
        central: Dict[int, np.ndarray] = {}
        for m in range((-radius) // block, -((-radius) // block)):
            central[m] = _snap_block(_window_block(v_raw, m * block, block))
        v_op = block_diagonal(0, block, bg_block, central=central)

    residual = max_entry_difference(multiply(v_op, w_op), op)
    if residual > tol:
        raise NumericalError(
            f"reconstruction residual {residual:.3e} exceeds tolerance {tol:.3e}")
    for factor in (v_op, w_op):
        res = unitarity_residual(factor)
        if res > tol:
            raise NumericalError(
                f"factor unitarity residual {res:.3e} exceeds tolerance {tol:.3e}")
    return DecompositionResult(v=v_op, w=w_op, block_size=block,
                               residual=residual, block_leakage=leakage)


def retract_periodic(op: Operator, tol: float = CHECK_TOL) -> PeriodicBandOperator:
    """The unique periodic operator agreeing with op outside its patch window."""
    background = op.background if isinstance(op, EndPeriodicOperator) else op
    res = unitarity_residual(background)
    if res > tol:
        raise ValidationError(
            f"periodic background is not unitary (residual {res:.3e}); "
            "the patch is load-bearing beyond its window")
    return background


def factor_end_periodic(op: Operator, tol: float = CHECK_TOL) -> EndPeriodicSplit:
    """Split op = finite_part * periodic_part, the finite part a patch over
    the identity and the periodic part the background retraction."""
    require_unitary(op, max(tol, CHECK_TOL))
    periodic_part = retract_periodic(op, tol)
    raw = _as_end_periodic(multiply(op, adjoint(periodic_part)))

    bg_dev = max_entry_difference(raw.background, identity())
    if bg_dev > tol:
        raise NumericalError(
            f"finite part fails to settle to the identity (deviation {bg_dev:.3e})")
    radius = raw.patch_radius
    patch = {(i, j): raw.entry(i, j)
             for i in range(-radius, radius) for j in range(-radius, radius)}
    finite = EndPeriodicOperator(identity(), radius, patch)
    finite_part: Operator = finite.background if finite.patch_radius == 0 else finite

    residual = max_entry_difference(multiply(finite_part, periodic_part), op)
    if residual > tol:
        raise NumericalError(
            f"split residual {residual:.3e} exceeds tolerance {tol:.3e}")
    return EndPeriodicSplit(finite_part=finite_part,
                            periodic_part=periodic_part, residual=residual)


def synth_random(target_index: int, period: int = 1, block_size: int = 1,
                 patch_blocks: int = 0, seed: Optional[int] = None) -> Operator:
    """Deterministic test operator with the requested index.

    A power of the shift carries the index; Haar blocks embedded periodically
    at staggered offsets and an optional finite Haar patch contribute index
    zero each, so the product's index is exactly target_index.
    """
    if seed is None:
        raise ValidationError("a seed is required")
    period = int(period)
    block_size = int(block_size)
    patch_blocks = int(patch_blocks)
    if period < 1 or block_size < 1 or patch_blocks < 0:
        raise ValidationError("period and block size must be >= 1, patches >= 0")

    rng = np.random.default_rng(int(seed))
    op: Operator = make_shift(int(target_index))
    op = multiply(op, delta_embed(haar_unitary(period, rng), 0))
    stagger = -max(1, block_size // 2)
    op = multiply(op, delta_embed(haar_unitary(block_size, rng), stagger))
    if patch_blocks > 0:
        op = multiply(op, embed_finite(haar_unitary(2 * patch_blocks, rng)))
    return op
