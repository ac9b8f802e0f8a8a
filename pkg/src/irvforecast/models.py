"""Scenario builders that turn concrete tallies into election models."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .dist import DiscreteDist, discretized_normal
from .domain import Candidate, Ranking, collapse_full_rankings
from .engine import ElectionModel
from .errors import ParseError, ValidationError
from .tabulator import validate_tally

# Historical recount shifts (US state elections, 2000-2023), as fractions.
RECOUNT_MEAN_SHIFT = 0.00077
RECOUNT_SD_SHIFT = 0.00146


@dataclass(frozen=True)
class RecountParams:
    mean_shift: float = RECOUNT_MEAN_SHIFT
    sd_shift: float = RECOUNT_SD_SHIFT
    trunc_z: float = 5.0

    def __post_init__(self):
        if self.sd_shift < 0:
            raise ValidationError("sd_shift must be non-negative")
        if self.trunc_z <= 0:
            raise ValidationError("trunc_z must be positive")


@dataclass(frozen=True)
class PartialCountParams:
    fraction_counted: float = 1.0
    dispersion: float = 0.5
    bucket_size: int = 1
    trunc_z: float = 5.0

    def __post_init__(self):
        if not 0 < self.fraction_counted <= 1:
            raise ValidationError(f"fraction_counted must be in (0, 1], got {self.fraction_counted}")
        if self.dispersion < 0:
            raise ValidationError("dispersion must be non-negative")
        if self.bucket_size < 1 or int(self.bucket_size) != self.bucket_size:
            raise ValidationError("bucket_size must be a positive integer")


def recount_model(tally: Mapping[Ranking, int], candidates: Sequence[Candidate],
                  params: RecountParams = RecountParams()) -> ElectionModel:
    """Per-ranking normal shift of each count, at single-vote resolution.

    A ranking with ``c`` votes becomes Normal(c * (1 + mean_shift),
    c * sd_shift) sampled at integer counts.
    """
    n = len(candidates)
    tally = collapse_full_rankings(validate_tally(tally, n), n)
    dists = {}
    for r, c in tally.items():
        if c == 0:
            dists[r] = DiscreteDist.point(0, 1)
        else:
            dists[r] = discretized_normal(c * (1 + params.mean_shift), c * params.sd_shift,
                                          bucket_size=1, trunc_z=params.trunc_z)
    return ElectionModel(tuple(candidates), dists, 1)


def partial_count_model(counted: Mapping[Ranking, int], candidates: Sequence[Candidate],
                        params: PartialCountParams) -> ElectionModel:
    """Predict final totals from a partial count.

    Each ranking's final total is centred on ``c / fraction`` with standard
    deviation ``dispersion * (c / fraction) * (1 - fraction)``, and can
    never fall below the bucket of the ``c`` votes already counted. At
    ``fraction == 1`` the counts are known, so the model is a set of exact
    point masses at single-vote resolution.
    """
    n = len(candidates)
    counted = collapse_full_rankings(validate_tally(counted, n), n)
    f = params.fraction_counted
    if f == 1.0:
        return ElectionModel(tuple(candidates),
                             {r: DiscreteDist.point(c, 1) for r, c in counted.items()}, 1)
    b = params.bucket_size
    dists = {}
    for r, c in counted.items():
        mean = c / f
        sd = params.dispersion * mean * (1 - f)
        floor = c // b
        if round(sd / b) == 0:
            dists[r] = DiscreteDist.point(max(floor, int(mean + 0.5) // b), b)
        else:
            dists[r] = discretized_normal(mean, sd, bucket_size=b, trunc_z=params.trunc_z,
                                          min_bucket=floor)
    return ElectionModel(tuple(candidates), dists, b)


_FIELD_ALIASES = {"mean-shift": "mean_shift", "sd-shift": "sd_shift", "trunc-z": "trunc_z",
                  "fraction": "fraction_counted", "bucket-size": "bucket_size"}


def load_params_file(path: str | Path) -> dict[str, float]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _FIELD_ALIASES.get(key, key.replace("-", "_"))
        try:
            out[key] = float(value)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: {key} must be numeric, got {value!r}") from None
    return out


def params_from(cls, values: Mapping[str, float], **overrides):
    """Build ``cls`` from the subset of ``values`` it understands, then apply overrides."""
    names = {f.name: f.type for f in dataclasses.fields(cls)}
    kw = {k: v for k, v in values.items() if k in names}
    kw.update({k: v for k, v in overrides.items() if v is not None})
    if "bucket_size" in kw:
        kw["bucket_size"] = int(kw["bucket_size"])
    return cls(**kw)
