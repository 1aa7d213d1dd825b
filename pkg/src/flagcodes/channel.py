"""Multishot subspace channel and a brute-force minimum-distance flag decoder.

Randomness comes from :class:`random.Random` (Mersenne Twister MT19937,
Python's standard generator), seeded per trial with ``seed + trial``, so every
run is reproducible bit for bit on any CPython 3.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from flagcodes.flags import Flag, FlagCode
from flagcodes.matspace import Matrix, Subspace, rank, subspace_distance

PerShot = Union[int, Sequence[int]]


@dataclass(frozen=True)
class ChannelConfig:
    """Noise for each shot: ``erasures`` rows dropped, an ``errordim``-dimensional subspace added.

    A scalar applies to every shot, capped per shot at what that shot can
    carry (``t_i - 1`` erasures, ``n - t_i`` error dimensions).  A sequence
    gives one value per shot and is validated exactly.
    """

    erasures: PerShot = 0
    errordim: PerShot = 0
    seed: int = 0

    def per_shot(self, type_vector: Sequence[int], n: int) -> list[tuple[int, int]]:
        t = list(type_vector)
        er = self._expand(self.erasures, t, lambda ti: ti - 1, "erasures")
        ed = self._expand(self.errordim, t, lambda ti: n - ti, "errordim")
        return list(zip(er, ed))

    @staticmethod
    def _expand(value, t, limit, name) -> list[int]:
        if isinstance(value, int):
            if value < 0:
                raise ValueError(f"{name} must be non-negative")
            if value > max(limit(ti) for ti in t):
                raise ValueError(f"{name}={value} fits no shot of type {t}")
            return [min(value, limit(ti)) for ti in t]
        vals = list(value)
        if len(vals) != len(t):
            raise ValueError(f"{name} needs one value per shot ({len(t)})")
        for ti, v in zip(t, vals):
            if not 0 <= v <= limit(ti):
                raise ValueError(f"{name}={v} invalid for a shot of dimension {ti}")
        return vals


@dataclass(frozen=True)
class ReceivedWord:
    n: int
    subspaces: tuple[Subspace, ...]

    def __len__(self):
        return len(self.subspaces)

    def to_json(self) -> dict:
        return {"n": self.n, "subspaces": [s.to_json() for s in self.subspaces]}


def _random_invertible(F, t: int, rng: random.Random) -> Matrix:
    while True:
        m = Matrix(F, [[rng.randrange(F.size) for _ in range(t)] for _ in range(t)])
        if m.det():
            return m


def _random_full_rank(F, d: int, n: int, rng: random.Random) -> list[list[int]]:
    while True:
        rows = [[rng.randrange(F.size) for _ in range(n)] for _ in range(d)]
        if rank(Matrix(F, rows)) == d:
            return rows


def transmit(f: Flag, cfg: ChannelConfig, rng: random.Random | None = None) -> ReceivedWord:
    rng = rng or random.Random(cfg.seed)
    F, n = f.field, f.n
    out = []
    for s, (e, d) in zip(f, cfg.per_shot(f.type, n)):
        scrambled = (_random_invertible(F, s.k, rng) @ s.basis).rows
        dropped = set(rng.sample(range(s.k), e))
        rows = [list(r) for i, r in enumerate(scrambled) if i not in dropped]
        if d:
            rows += _random_full_rank(F, d, n, rng)
        out.append(Subspace(F, n, rows) if rows else Subspace.zero(F, n))
    return ReceivedWord(n, tuple(out))


def received_distance(f: Flag, r: ReceivedWord) -> int:
    if len(f) != len(r) or f.n != r.n:
        raise ValueError("received word does not match the flag shape")
    return sum(subspace_distance(a, b) for a, b in zip(f, r.subspaces))


def decode(c: FlagCode, r: ReceivedWord) -> tuple[Flag, int]:
    """Nearest codeword; ties go to the smaller flag in canonical order."""
    if len(r) != len(c.type) or r.n != c.n:
        raise ValueError("received word does not match the code shape")
    best = min(c.flags, key=lambda f: (received_distance(f, r), f.key))
    return best, received_distance(best, r)


def simulate(code: FlagCode, cfg: ChannelConfig, trials: int) -> Iterator[dict]:
    """One record per trial, then a summary record.

    Trial ``i`` sends codeword ``i mod |code|`` through a channel seeded with
    ``cfg.seed + i``; codewords are named by their index in the sorted code.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    cfg.per_shot(code.type, code.n)
    index = {f: i for i, f in enumerate(code.flags)}
    successes = 0
    for i in range(trials):
        seed = cfg.seed + i
        sent = code.flags[i % len(code)]
        got, dist = decode(code, transmit(sent, cfg, random.Random(seed)))
        ok = got == sent
        successes += ok
        yield {"trial": i, "seed": seed, "sent": index[sent], "decoded": index[got],
               "success": ok, "distance": dist}
    yield {
        "summary": True,
        "trials": trials,
        "successes": successes,
        "success_rate": successes / trials if trials else None,
        "erasures": cfg.erasures if isinstance(cfg.erasures, int) else list(cfg.erasures),
        "errordim": cfg.errordim if isinstance(cfg.errordim, int) else list(cfg.errordim),
        "seed": cfg.seed,
    }
