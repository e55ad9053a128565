"""Banded unitary operators on l2(Z) with exact finite data.

Two storage classes cover everything the library manipulates:

  PeriodicBandOperator   entries repeat along the diagonal with period n,
                         confined to a band |i-j| <= band
  EndPeriodicOperator    a periodic background plus a finite square patch
                         centered at 0 that overrides it entirely

Shift operators, block-diagonal operators, single-block periodic embeddings
and finite unitary insertions are all constructed into these classes, which
are closed under product and adjoint.  Scalars are complex doubles; exact
structure (indices, periods, radii) is integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import NumericalError, ValidationError

# canonicalization threshold: entries at or below this are treated as zero
ZERO_TOL = 1e-12
# default tolerance for unitarity and agreement checks
CHECK_TOL = 1e-9


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class PeriodicBandOperator:
    """Operator with S^n U S^{-n} = U, stored as one period of band entries.

    entries maps (i, d) -> complex for 0 <= i < period, |d| <= band, and
    means U[i + t*n, i + t*n + d] = entries[(i, d)] for every integer t.
    Absent entries are zero.  Construction validates ranges and drops
    near-zero values; it does not check unitarity.
    """

    __slots__ = ("period", "band", "entries")

    kind = "periodic"

    def __init__(self, period: int, band: int,
                 entries: Mapping[Tuple[int, int], complex]):
        period = int(period)
        band = int(band)
        if period < 1:
            raise ValidationError("period must be >= 1")
        if band < 0:
            raise ValidationError("band must be >= 0")
        clean: Dict[Tuple[int, int], complex] = {}
        for (i, d), v in entries.items():
            i, d = int(i), int(d)
            if not 0 <= i < period:
                raise ValidationError(f"row index {i} outside period range [0, {period})")
            if abs(d) > band:
                raise ValidationError(f"diagonal offset {d} violates band {band}")
            v = complex(v)
            if abs(v) > ZERO_TOL:
                clean[(i, d)] = v
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "band", band)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PeriodicBandOperator is immutable")

    def entry(self, i: int, j: int) -> complex:
        d = j - i
        if abs(d) > self.band:
            return 0j
        return self.entries.get((i % self.period, d), 0j)

    def prop_bound(self) -> int:
        """Structural bound on |i-j| for nonzero entries."""
        return self.band

    def adjoint(self) -> "PeriodicBandOperator":
        adj = {}
        for (i, d), v in self.entries.items():
            adj[((i + d) % self.period, -d)] = v.conjugate()
        return PeriodicBandOperator(self.period, self.band, adj)

    def __eq__(self, other) -> bool:
        # entrywise over a common refinement; tolerance matches the floating
        # representation (exact structure plus complex double values)
        if not isinstance(other, (PeriodicBandOperator, EndPeriodicOperator)):
            return NotImplemented
        return operators_close(self, other)

    __hash__ = None

    def __matmul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return (f"PeriodicBandOperator(period={self.period}, band={self.band}, "
                f"{len(self.entries)} entries)")


class EndPeriodicOperator:
    """A periodic background overridden on the finite window [-R, R)^2.

    Inside the window the entry is patch[(i, j)] with absent keys meaning an
    explicit zero; outside it the entry is the background's.  Construction
    shrinks the window while its outer ring agrees with the background within
    ZERO_TOL, so padding a patch with background values canonicalizes away.
    """

    __slots__ = ("background", "patch_radius", "patch")

    kind = "end-periodic"

    def __init__(self, background: PeriodicBandOperator, patch_radius: int,
                 patch: Mapping[Tuple[int, int], complex]):
        radius = int(patch_radius)
        if radius < 0:
            raise ValidationError("patch radius must be >= 0")
        clean: Dict[Tuple[int, int], complex] = {}
        for (i, j), v in patch.items():
            i, j = int(i), int(j)
            if not (-radius <= i < radius and -radius <= j < radius):
                raise ValidationError(
                    f"patch entry ({i}, {j}) outside window [-{radius}, {radius})")
            v = complex(v)
            if abs(v) > ZERO_TOL:
                clean[(i, j)] = v
        radius, clean = _shrink_patch(background, radius, clean)
        object.__setattr__(self, "background", background)
        object.__setattr__(self, "patch_radius", radius)
        object.__setattr__(self, "patch", clean)

    def __setattr__(self, name, value):
        raise AttributeError("EndPeriodicOperator is immutable")

    @property
    def period(self) -> int:
        return self.background.period

    def entry(self, i: int, j: int) -> complex:
        r = self.patch_radius
        if -r <= i < r and -r <= j < r:
            return self.patch.get((i, j), 0j)
        return self.background.entry(i, j)

    def prop_bound(self) -> int:
        reach = max(2 * self.patch_radius - 1, 0)
        return max(self.background.band, reach)

    def adjoint(self) -> "EndPeriodicOperator":
        adj = {(j, i): v.conjugate() for (i, j), v in self.patch.items()}
        return EndPeriodicOperator(self.background.adjoint(),
                                   self.patch_radius, adj)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PeriodicBandOperator, EndPeriodicOperator)):
            return NotImplemented
        return operators_close(self, other)

    __hash__ = None

    def __matmul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return (f"EndPeriodicOperator(background={self.background!r}, "
                f"patch_radius={self.patch_radius}, {len(self.patch)} patch entries)")


Operator = Union[PeriodicBandOperator, EndPeriodicOperator]


def _shrink_patch(background, radius, patch):
    """Drop outer rings of the patch window that match the background."""
    while radius > 0:
        ring = []
        lo, hi = -radius, radius - 1
        for k in range(-radius, radius):
            ring.extend([(lo, k), (hi, k), (k, lo), (k, hi)])
        if all(abs(patch.get(cell, 0j) - background.entry(*cell)) <= ZERO_TOL
               for cell in ring):
            radius -= 1
            patch = {cell: v for cell, v in patch.items()
                     if -radius <= cell[0] < radius and -radius <= cell[1] < radius}
        else:
            break
    return radius, patch


def _as_end_periodic(op: Operator) -> EndPeriodicOperator:
    if isinstance(op, EndPeriodicOperator):
        return op
    return EndPeriodicOperator(op, 0, {})


def _collapse(op: EndPeriodicOperator) -> Operator:
    """An end-periodic operator whose patch shrank away is just its background."""
    if op.patch_radius == 0:
        return op.background
    return op


# -- constructors -------------------------------------------------------------

def make_periodic(period: int, band: int,
                  entry_list: Iterable[Tuple[int, int, complex]]) -> PeriodicBandOperator:
    """Build a periodic operator from (i, d, value) triples; duplicates rejected."""
    entries: Dict[Tuple[int, int], complex] = {}
    for i, d, v in entry_list:
        key = (int(i), int(d))
        if key in entries:
            raise ValidationError(f"duplicate entry at (i, d) = {key}")
        entries[key] = v
    return PeriodicBandOperator(period, band, entries)


def make_shift(k: int) -> PeriodicBandOperator:
    """S^k: (S^k v)_i = v_{i+k}, a single unit diagonal at offset k."""
    k = int(k)
    return PeriodicBandOperator(1, abs(k), {(0, k): 1.0})


def identity() -> PeriodicBandOperator:
    return make_shift(0)


def delta_embed(block: np.ndarray, k: int = 0) -> PeriodicBandOperator:
    """Periodic operator repeating one LxL block along the diagonal, blocks
    occupying [k + n*L, k + (n+1)*L)^2."""
    m = np.asarray(block, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError("block must be a square matrix")
    size = m.shape[0]
    entries: Dict[Tuple[int, int], complex] = {}
    for r in range(size):
        for c in range(size):
            entries[((k + r) % size, c - r)] = m[r, c]
    return PeriodicBandOperator(size, max(size - 1, 0), entries)


def block_diagonal(k: int, block_size: int, repeating: np.ndarray,
                   central: Optional[Mapping[int, np.ndarray]] = None) -> Operator:
    """Block-diagonal operator on the grid [k + n*L, k + (n+1)*L)^2.

    With only `repeating` the block tiles the whole diagonal (periodic).
    `central` maps block indices n to blocks that replace the repeating one
    there, giving an end-periodic operator.
    """
    size = int(block_size)
    if size < 1:
        raise ValidationError("block size must be >= 1")
    bg = delta_embed(repeating, k)
    if not central:
        return bg
    blocks = {}
    for n, mat in central.items():
        m = np.asarray(mat, dtype=complex)
        if m.shape != (size, size):
            raise ValidationError(f"central block {n} is not {size}x{size}")
        blocks[int(n)] = m
    radius = max(max(-(k + n * size), k + (n + 1) * size) for n in blocks)
    radius = max(radius, 1)
    patch: Dict[Tuple[int, int], complex] = {}
    for i in range(-radius, radius):
        for j in range(-radius, radius):
            patch[(i, j)] = bg.entry(i, j)
    for n, m in blocks.items():
        base = k + n * size
        for r in range(size):
            for c in range(size):
                patch[(base + r, base + c)] = m[r, c]
    return _collapse(EndPeriodicOperator(bg, radius, patch))


def embed_finite(matrix: np.ndarray) -> Operator:
    """Insert a 2m x 2m unitary over the identity, occupying [-m, m)^2."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("matrix must be square")
    size = m.shape[0]
    if size == 0 or size % 2:
        raise ValidationError("matrix size must be a positive even number")
    half = size // 2
    patch = {(-half + r, -half + c): m[r, c]
             for r in range(size) for c in range(size)}
    return _collapse(EndPeriodicOperator(identity(), half, patch))


# -- algebra -------------------------------------------------------------------

def adjoint(op: Operator) -> Operator:
    return op.adjoint()


def _multiply_periodic(a: PeriodicBandOperator,
                       b: PeriodicBandOperator) -> PeriodicBandOperator:
    n = _lcm(a.period, b.period)
    band = a.band + b.band
    entries: Dict[Tuple[int, int], complex] = {}
    for i in range(n):
        for d in range(-band, band + 1):
            j = i + d
            acc = 0j
            for k in range(max(i - a.band, j - b.band),
                           min(i + a.band, j + b.band) + 1):
                acc += a.entry(i, k) * b.entry(k, j)
            if abs(acc) > ZERO_TOL:
                entries[(i, d)] = acc
    return PeriodicBandOperator(n, band, entries)


def multiply(a: Operator, b: Operator) -> Operator:
    """Exact banded product; propagation is subadditive by construction.

    The patch window of the result is a conservative envelope around both
    input patches, computed as one dense window product; the constructor's
    shrink pass trims it back to the rows that actually deviate from the
    background product.
    """
    if isinstance(a, PeriodicBandOperator) and isinstance(b, PeriodicBandOperator):
        return _multiply_periodic(a, b)
    ae, be = _as_end_periodic(a), _as_end_periodic(b)
    bg = _multiply_periodic(ae.background, be.background)
    pa = ae.prop_bound()
    radius = (max(ae.patch_radius, be.patch_radius, 1)
              + _lcm(ae.period, be.period) + pa + be.prop_bound())
    window = range(-radius, radius)
    mid = range(-radius - pa, radius + pa)  # covers every k a window row reaches
    left = np.array([[ae.entry(i, k) for k in mid] for i in window])
    right = np.array([[be.entry(k, j) for j in window] for k in mid])
    product = left @ right
    patch: Dict[Tuple[int, int], complex] = {
        (i, j): product[i + radius, j + radius]
        for i in window for j in window}
    return _collapse(EndPeriodicOperator(bg, radius, patch))


def propagation(op: Operator, tol: float = 0.0) -> int:
    """Largest |i-j| with |entry| > tol over one period plus the patch window."""
    worst = 0
    if isinstance(op, PeriodicBandOperator):
        for (_, d), v in op.entries.items():
            if abs(v) > tol:
                worst = max(worst, abs(d))
        return worst
    worst = propagation(op.background, tol)
    for (i, j), v in op.patch.items():
        if abs(v) > tol:
            worst = max(worst, abs(i - j))
    return worst


def max_entry_difference(a: Operator, b: Operator) -> float:
    """sup |a_ij - b_ij|, evaluated over a window wide enough to witness it.

    The window covers both patches, the rows their bands reach, and one full
    common background period beyond; everything outside repeats rows inside.
    """
    ae, be = _as_end_periodic(a), _as_end_periodic(b)
    prop = max(ae.prop_bound(), be.prop_bound(), 1)
    reach = (max(ae.patch_radius, be.patch_radius) + prop
             + _lcm(ae.period, be.period))
    worst = 0.0
    for i in range(-reach, reach):
        for j in range(i - prop, i + prop + 1):
            worst = max(worst, abs(ae.entry(i, j) - be.entry(i, j)))
    return worst


def operators_close(a: Operator, b: Operator, tol: float = CHECK_TOL) -> bool:
    return max_entry_difference(a, b) <= tol


def unitarity_residual(op: Operator) -> float:
    """max deviation of op*op^adj and op^adj*op from the identity."""
    ident = identity()
    star = op.adjoint()
    return max(max_entry_difference(multiply(op, star), ident),
               max_entry_difference(multiply(star, op), ident))


def require_unitary(op: Operator, tol: float = CHECK_TOL) -> float:
    res = unitarity_residual(op)
    if res > tol:
        raise NumericalError(f"operator is not unitary: residual {res:.3e} > {tol:.3e}")
    return res


@dataclass(frozen=True)
class CornerData:
    """Finitely supported parts of the two off-corner blocks.

    minus_plus[r, c] = U[-size + r, c] covers rows i < 0, columns j >= 0;
    plus_minus[r, c] = U[r, -size + c] covers rows i >= 0, columns j < 0.
    Everything outside vanishes by the band bound.
    """
    minus_plus: np.ndarray
    plus_minus: np.ndarray
    size: int


def corner_data(op: Operator) -> CornerData:
    k = max(op.prop_bound(), getattr(op, "patch_radius", 0))
    mp = np.zeros((k, k), dtype=complex)
    pm = np.zeros((k, k), dtype=complex)
    for r in range(k):
        for c in range(k):
            mp[r, c] = op.entry(-k + r, c)
            pm[r, c] = op.entry(r, -k + c)
    return CornerData(minus_plus=mp, plus_minus=pm, size=k)


# -- states --------------------------------------------------------------------

class StateVector:
    """Finitely supported vector in l2(Z), stored index -> complex amplitude."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: Mapping[int, complex]):
        amps = {int(i): complex(v) for i, v in amplitudes.items()
                if abs(complex(v)) > 0.0}
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def delta(cls, j: int = 0) -> "StateVector":
        return cls({j: 1.0})

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.amplitudes.values())))

    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.amplitudes))

    def __getitem__(self, j: int) -> complex:
        return self.amplitudes.get(int(j), 0j)

    def __repr__(self):
        items = ", ".join(f"{i}: {v}" for i, v in sorted(self.amplitudes.items()))
        return f"StateVector({{{items}}})"


def apply_state(op: Operator, psi: StateVector) -> StateVector:
    """(op psi)_i = sum_j op[i, j] psi_j; support grows by at most prop(op)."""
    reach = max(op.prop_bound(), getattr(op, "patch_radius", 0))
    out: Dict[int, complex] = {}
    for j, v in psi.amplitudes.items():
        for i in range(j - reach, j + reach + 1):
            w = op.entry(i, j)
            if w != 0:
                out[i] = out.get(i, 0j) + w * v
    return StateVector(out)
