"""Small dense complex matrix helpers: Haar sampling, polar projection."""

from __future__ import annotations

import numpy as np


def haar_unitary(size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    The R factor's diagonal is rotated to be real positive, which makes the
    distribution exactly Haar and the draw deterministic given the rng state.
    """
    z = (rng.standard_normal((size, size))
         + 1j * rng.standard_normal((size, size))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def polar_unitary(m: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition: the nearest unitary to m."""
    u, _, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    return u @ vh


def unitary_defect(m: np.ndarray) -> float:
    """max |(m* m - I)_{ij}|, zero exactly for unitary m."""
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return float(np.max(np.abs(m.conj().T @ m - eye)))
