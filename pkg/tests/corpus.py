"""The random polygon corpus shared by the corpus-wide tests."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from gallery.geom import Polygon, essential_set
from gallery.oracle import PolygonSpec, random_polygon

CORPUS_SIZE = 240
MAX_REFLEX = 4
DISCRETE_LIMIT = 24


@dataclass(frozen=True)
class Entry:
    seed: int
    n: int
    polygon: Polygon


def spec_for(seed: int) -> PolygonSpec:
    n = 4 + seed % 9
    return PolygonSpec(n, seed, reflex=min(MAX_REFLEX, max(1, n - 4)))


@lru_cache(maxsize=None)
def corpus() -> tuple[Entry, ...]:
    out = []
    for seed in range(CORPUS_SIZE):
        spec = spec_for(seed)
        P = random_polygon(spec)
        if P.r <= MAX_REFLEX:
            out.append(Entry(seed, spec.n, P))
    return tuple(out)


def discretized_size(P: Polygon) -> int:
    """Vertex count of the polygon subdivided at its essential points."""
    return len(essential_set(P))


@lru_cache(maxsize=None)
def small_discrete() -> tuple[Entry, ...]:
    """Corpus entries whose subdivided and refined polygons both stay within the oracle limit."""
    return tuple(e for e in corpus() if 2 * discretized_size(e.polygon) <= DISCRETE_LIMIT)


MANIFEST = Path(__file__).parent / "data" / "corpus_answers.txt"
K_RANGE = range(0, 5)


def oracle_cases():
    """Brute-force answers for every corpus case, in manifest order."""
    from gallery.oracle import CorpusCase, brute_force
    from gallery.structured import Variant

    cases = []
    for e in corpus():
        for k in K_RANGE:
            cases.append(CorpusCase(e.seed, e.n, k, Variant.VV, brute_force(e.polygon, k).answer))
    for e in small_discrete():
        for variant in (Variant.BV, Variant.VB):
            for k in K_RANGE:
                cases.append(CorpusCase(e.seed, e.n, k, variant, brute_force(e.polygon, k, variant).answer))
    return cases


if __name__ == "__main__":
    from gallery.oracle import save_manifest

    save_manifest(oracle_cases(), MANIFEST)
    print(f"wrote {MANIFEST}")
