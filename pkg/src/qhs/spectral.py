"""Unitary discrete Fourier transforms over Z_M and Z_p^n.

Sign convention: the forward transform uses the kernel exp(-2*pi*i*x*y/M),
the inverse uses exp(+2*pi*i*x*y/M), and both carry the 1/sqrt(M) factor.
The fast path is numpy's FFT; ``method="direct"`` evaluates the defining sum
and is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .groups import Cyclic, DomainError, DomainSpec, Product
from .tolerances import TOL

Direction = Literal["forward", "inverse"]
Method = Literal["fast", "direct"]


@dataclass(frozen=True)
class AmplitudeVector:
    entries: np.ndarray
    domain: DomainSpec

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex).reshape(-1)
        if entries.size != self.domain.size:
            raise DomainError(
                f"amplitude vector has {entries.size} entries, domain has {self.domain.size}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValueError("amplitude vector has non-finite entries")
        object.__setattr__(self, "entries", entries)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def _direct_matrix(M: int, sign: int) -> np.ndarray:
    # exponent reduced mod M in exact integers before going to floating point
    k = np.arange(M, dtype=np.int64)
    phase = np.outer(k, k) % M
    return np.exp(sign * 2j * np.pi * phase / M) / np.sqrt(M)


def dft(v: AmplitudeVector, direction: Direction = "forward", method: Method = "fast") -> AmplitudeVector:
    if not isinstance(v.domain, Cyclic):
        raise DomainError("dft requires a cyclic domain; use dft_product for Z_p^n")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    if method == "direct":
        sign = -1 if direction == "forward" else 1
        out = _direct_matrix(v.domain.M, sign) @ v.entries
    elif method == "fast":
        f = np.fft.fft if direction == "forward" else np.fft.ifft
        out = f(v.entries, norm="ortho")
    else:
        raise ValueError(f"unknown method {method!r}")
    return AmplitudeVector(out, v.domain)


def dft_product(v: AmplitudeVector, direction: Direction = "forward", method: Method = "fast") -> AmplitudeVector:
    """Fourier transform on Z_p^n with character exp(-2*pi*i*(x . y)/p)."""
    d = v.domain
    if not isinstance(d, Product):
        raise DomainError("dft_product requires a product domain Z_p^n")
    if method == "fast":
        f = np.fft.fftn if direction == "forward" else np.fft.ifftn
        out = f(v.entries.reshape(d.shape), norm="ortho").reshape(-1)
    elif method == "direct":
        sign = -1 if direction == "forward" else 1
        coords = np.indices(d.shape).reshape(d.n, -1).T
        dots = (coords @ coords.T) % d.p
        kernel = np.exp(sign * 2j * np.pi * dots / d.p) / np.sqrt(d.size)
        out = kernel @ v.entries
    else:
        raise ValueError(f"unknown method {method!r}")
    return AmplitudeVector(out, d)


def transform(v: AmplitudeVector, direction: Direction = "forward", method: Method = "fast") -> AmplitudeVector:
    """Dispatch to the cyclic or product transform by domain."""
    if isinstance(v.domain, Product):
        return dft_product(v, direction, method)
    return dft(v, direction, method)


def spectrum_support(dist, tol: float = TOL.support) -> set[int]:
    """Frequency indices whose probability exceeds ``tol``."""
    prob = np.asarray(dist.prob)
    return {int(j) for j in np.flatnonzero(prob > tol)}
