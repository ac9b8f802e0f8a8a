"""Bucketed discrete distributions of vote counts and their convolution.

A :class:`DiscreteDist` stores probability mass over buckets of a fixed
size; bucket ``k`` stands for the vote counts ``[k*b, (k+1)*b)`` and is
labelled by its lower edge ``k*b``. Storage is sparse at the low end: only
the window ``[offset, offset + len(mass))`` is kept.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DomainMismatchError, NumericalError, ValidationError

SUM_TOL = 1e-9
FFT_NEG_TOL = 1e-12
AUTO_FFT_THRESHOLD = 256

Strategy = Literal["naive", "fft", "auto"]
Method = Literal["pdf-sample", "interval-integral"]


@dataclass(frozen=True)
class BucketDomain:
    bucket_size: int = 1

    def __post_init__(self):
        if int(self.bucket_size) != self.bucket_size or self.bucket_size < 1:
            raise ValidationError(f"bucket_size must be a positive integer, got {self.bucket_size}")

    def label(self, k: int) -> int:
        return k * self.bucket_size

    def representative(self, k):
        """Midpoint of the integer vote counts in bucket ``k``."""
        return k * self.bucket_size + (self.bucket_size - 1) / 2

    def bucket_of(self, votes: float) -> int:
        """Bucket holding the integer nearest to ``votes``."""
        return max(0, int(np.floor(votes + 0.5)) // self.bucket_size)


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    bucket_size: int
    mass: np.ndarray
    offset: int = 0
    _checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=np.float64).ravel()
        if self.bucket_size < 1 or int(self.bucket_size) != self.bucket_size:
            raise ValidationError(f"bucket_size must be a positive integer, got {self.bucket_size}")
        if self.offset < 0:
            raise ValidationError("offset must be non-negative")
        if m.size == 0:
            raise ValidationError("distribution has no mass")
        if self._checked:
            if not np.all(np.isfinite(m)) or m.min() < 0 or m.max() > 1 + SUM_TOL:
                raise ValidationError("probabilities must lie in [0, 1]")
            if abs(m.sum() - 1.0) > SUM_TOL:
                raise ValidationError(f"probabilities sum to {m.sum():.12g}, not 1")
        nz = np.flatnonzero(m)
        if nz.size and (nz[0] > 0 or nz[-1] < m.size - 1):
            object.__setattr__(self, "offset", self.offset + int(nz[0]))
            m = m[nz[0]: nz[-1] + 1]
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "mass", m)

    # -- constructors --------------------------------------------------
    @classmethod
    def from_array(cls, mass: Sequence[float], bucket_size: int = 1, *, offset: int = 0,
                   normalize: bool = False) -> "DiscreteDist":
        m = np.asarray(mass, dtype=np.float64)
        if normalize:
            total = m.sum()
            if total <= 0:
                raise ValidationError("cannot normalize a distribution with zero mass")
            m = m / total
        return cls(int(bucket_size), m, int(offset))

    @classmethod
    def point(cls, bucket: int, bucket_size: int = 1) -> "DiscreteDist":
        """Point mass at bucket index ``bucket``."""
        return cls(int(bucket_size), np.ones(1), int(bucket))

    @classmethod
    def point_at_votes(cls, votes: float, bucket_size: int = 1) -> "DiscreteDist":
        return cls.point(BucketDomain(bucket_size).bucket_of(votes), bucket_size)

    @classmethod
    def _trusted(cls, mass: np.ndarray, bucket_size: int, offset: int) -> "DiscreteDist":
        return cls(bucket_size, mass, offset, _checked=False)

    # -- views ---------------------------------------------------------
    @property
    def domain(self) -> BucketDomain:
        return BucketDomain(self.bucket_size)

    @property
    def end(self) -> int:
        """One past the last stored bucket index."""
        return self.offset + self.mass.size

    def dense(self, length: int | None = None) -> np.ndarray:
        """Mass indexed from bucket 0, zero-padded to ``length`` if given."""
        n = self.end if length is None else length
        if n < self.end:
            raise ValueError(f"length {n} truncates support ending at {self.end}")
        out = np.zeros(n)
        out[self.offset:self.end] = self.mass
        return out

    def pmf(self, bucket: int) -> float:
        i = bucket - self.offset
        return float(self.mass[i]) if 0 <= i < self.mass.size else 0.0

    def prob_at_votes(self, votes: int) -> float:
        return self.pmf(votes // self.bucket_size)

    def support(self) -> np.ndarray:
        return self.offset + np.flatnonzero(self.mass)

    def labels(self) -> np.ndarray:
        return (self.offset + np.arange(self.mass.size)) * self.bucket_size

    def mean(self) -> float:
        """Mean in votes, using bucket labels as representative values."""
        return float(np.dot(self.labels(), self.mass))

    def var(self) -> float:
        lab = self.labels()
        mu = np.dot(lab, self.mass)
        return float(np.dot((lab - mu) ** 2, self.mass))

    def is_point_mass(self) -> bool:
        return self.mass.size == 1

    def allclose(self, other: "DiscreteDist", atol: float = 1e-12) -> bool:
        if self.bucket_size != other.bucket_size:
            return False
        n = max(self.end, other.end)
        return bool(np.allclose(self.dense(n), other.dense(n), rtol=0, atol=atol))

    def __repr__(self) -> str:
        return (f"DiscreteDist(bucket_size={self.bucket_size}, offset={self.offset}, "
                f"n={self.mass.size}, mean={self.mean():.4g})")


def _check_pair(f: DiscreteDist, g: DiscreteDist) -> None:
    if f.bucket_size != g.bucket_size:
        raise DomainMismatchError(f"bucket sizes differ: {f.bucket_size} vs {g.bucket_size}")


def _finish(raw: np.ndarray, f: DiscreteDist, g: DiscreteDist) -> DiscreteDist:
    total = raw.sum()
    if not np.isfinite(total) or total <= 0:
        raise NumericalError("convolution produced no mass")
    return DiscreteDist._trusted(raw / total, f.bucket_size, f.offset + g.offset)


def convolve_naive(f: DiscreteDist, g: DiscreteDist) -> DiscreteDist:
    """Direct summation ``(f*g)(k) = sum_i f(i) g(k-i)``."""
    _check_pair(f, g)
    return _finish(np.convolve(f.mass, g.mass), f, g)


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def convolve_fft(f: DiscreteDist, g: DiscreteDist) -> DiscreteDist:
    """Convolution through the real FFT, zero-padded to a power of two."""
    _check_pair(f, g)
    la, lb = f.mass.size, g.mass.size
    n_out = la + lb - 1
    size = _next_pow2(n_out)
    raw = np.fft.irfft(np.fft.rfft(f.mass, size) * np.fft.rfft(g.mass, size), size)[:n_out]
    lo = raw.min()
    if lo < -FFT_NEG_TOL:
        raise NumericalError(f"FFT convolution produced mass {lo:.3g} below -{FFT_NEG_TOL}")
    np.clip(raw, 0.0, None, out=raw)
    return _finish(raw, f, g)


def convolve(f: DiscreteDist, g: DiscreteDist, strategy: Strategy = "auto") -> DiscreteDist:
    if strategy == "naive":
        return convolve_naive(f, g)
    if strategy == "fft":
        return convolve_fft(f, g)
    if strategy != "auto":
        raise ValueError(f"unknown strategy {strategy!r}")
    if f.is_point_mass() or g.is_point_mass():
        _check_pair(f, g)
        base = g if f.is_point_mass() else f
        return DiscreteDist._trusted(base.mass, f.bucket_size, f.offset + g.offset)
    if min(f.mass.size, g.mass.size) > AUTO_FFT_THRESHOLD:
        return convolve_fft(f, g)
    return convolve_naive(f, g)


def convolve_many(fs: Sequence[DiscreteDist], strategy: Strategy = "auto") -> DiscreteDist:
    """Left fold of pairwise convolution."""
    if len(fs) == 0:
        raise ValidationError("convolve_many needs at least one distribution")
    out = fs[0]
    for g in fs[1:]:
        out = convolve(out, g, strategy)
    return out


def cdf(f: DiscreteDist, length: int | None = None) -> np.ndarray:
    """Cumulative mass indexed from bucket 0; entry k is P(X <= bucket k)."""
    c = np.cumsum(f.dense(length))
    return c


def discretized_normal(mean: float, sd: float, bucket_size: int = 1, trunc_z: float = 5.0,
                       method: Method = "pdf-sample", min_bucket: int = 0) -> DiscreteDist:
    """Normal(mean, sd) vote count restricted to buckets within ``trunc_z`` sds.

    Each bucket is represented by the midpoint of the integer counts it
    holds (the count itself when ``bucket_size == 1``). ``pdf-sample``
    evaluates the density there; ``interval-integral`` integrates it over
    the bucket's counts with a half-vote continuity correction. Buckets
    below ``min_bucket`` or outside the truncation window are dropped. When
    nothing survives (``sd == 0``, or sd tiny next to the bucket) the result
    is a point mass at the bucket holding the rounded mean.
    """
    if sd < 0:
        raise ValidationError(f"sd must be non-negative, got {sd}")
    if trunc_z <= 0:
        raise ValidationError(f"trunc_z must be positive, got {trunc_z}")
    dom = BucketDomain(bucket_size)
    b = bucket_size
    home = max(dom.bucket_of(mean), min_bucket)
    if sd == 0:
        return DiscreteDist.point(home, bucket_size)
    lo_v, hi_v = mean - trunc_z * sd, mean + trunc_z * sd
    half = (b - 1) / 2
    if method == "pdf-sample":
        k_lo = max(int(np.ceil((lo_v - half) / b)), min_bucket, 0)
        k_hi = int(np.floor((hi_v - half) / b))
        if k_hi < k_lo:
            return DiscreteDist.point(home, bucket_size)
        ks = np.arange(k_lo, k_hi + 1)
        z = (dom.representative(ks) - mean) / sd
        w = np.exp(-0.5 * z * z)
    elif method == "interval-integral":
        k_lo = max(int(np.floor((lo_v + 0.5) / b)), min_bucket, 0)
        k_hi = int(np.floor((hi_v + 0.5) / b))
        if k_hi < k_lo:
            return DiscreteDist.point(home, bucket_size)
        ks = np.arange(k_lo, k_hi + 1)
        left = np.maximum(ks * b - 0.5, lo_v)
        right = np.minimum((ks + 1) * b - 0.5, hi_v)
        w = np.clip(ndtr((right - mean) / sd) - ndtr((left - mean) / sd), 0.0, None)
    else:
        raise ValueError(f"unknown discretization method {method!r}")
    total = w.sum()
    if total <= 0:
        return DiscreteDist.point(home, bucket_size)
    return DiscreteDist._trusted(w / total, bucket_size, int(ks[0]))
