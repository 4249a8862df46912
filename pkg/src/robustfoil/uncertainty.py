"""Reproducible sampling of the uncertain inputs (Reynolds number, model index).

Every draw comes from its own counter-keyed substream, derived from
``(seed, purpose, iteration, sample)``, so a batch never depends on the
order in which samples are produced or on how many workers produce them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RE_MIN = 1.0e6
RE_MAX = 1.0e7
N_MODELS = 5

DSP_RE = 5.0e6
DSP_MODEL = 1

# Substream purposes; the optimizer and the post-hoc study never share draws.
OPTIMIZATION = 0
STUDY = 1


@dataclass(frozen=True)
class UncertainInput:
    re_c: float
    model_id: int

    def __post_init__(self):
        if not RE_MIN <= self.re_c <= RE_MAX:
            raise ValueError(f"re_c={self.re_c:.6g} outside [{RE_MIN:g}, {RE_MAX:g}]")
        if self.model_id not in range(1, N_MODELS + 1):
            raise ValueError(f"model_id={self.model_id} outside 1..{N_MODELS}")


@dataclass(frozen=True)
class RngStream:
    seed: int
    purpose: int = OPTIMIZATION
    re_bounds: tuple[float, float] = (RE_MIN, RE_MAX)
    n_models: int = N_MODELS
    log_uniform_re: bool = False

    def generator(self, iteration: int, sample: int) -> np.random.Generator:
        key = np.random.SeedSequence(
            self.seed & 0xFFFF_FFFF_FFFF_FFFF,
            spawn_key=(self.purpose, int(iteration), int(sample)),
        )
        return np.random.Generator(np.random.Philox(key))

    def draw(self, iteration: int, sample: int) -> UncertainInput:
        rng = self.generator(iteration, sample)
        u = rng.random()
        lo, hi = self.re_bounds
        if self.log_uniform_re:
            re = 10.0 ** (np.log10(lo) + u * (np.log10(hi) - np.log10(lo)))
        else:
            re = lo + u * (hi - lo)
        model = int(rng.integers(1, self.n_models + 1))
        return UncertainInput(float(min(max(re, lo), hi)), model)


def sample_batch(stream: RngStream, iteration: int, n: int) -> list[UncertainInput]:
    if n < 1:
        raise ValueError(f"batch size must be >= 1, got {n}")
    return [stream.draw(iteration, i) for i in range(n)]


def dsp_input() -> UncertainInput:
    """Fixed operating point of the deterministic single-point design."""
    return UncertainInput(DSP_RE, DSP_MODEL)
