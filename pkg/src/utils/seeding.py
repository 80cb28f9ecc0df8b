"""
LinkSched - Seeding Utility
64-bit seed mixing so that every random stream is derived from one master seed
"""

import numpy as np

MASK64 = ( 1 << 64 ) - 1

# Stream tags, one per kind of random draw
LAYOUT_STREAM = 0x4C41594F5554
FADING_STREAM = 0x464144494E47
RANDOM_STREAM = 0x52414E444F4D
SPLIT_STREAM = 0x53504C4954
TIMING_STREAM = 0x54494D494E47


def _splitmix64 ( x: int ) -> int :
    """SplitMix64 finaliser"""

    x = ( x + 0x9E3779B97F4A7C15 ) & MASK64
    x = ( ( x ^ ( x >> 30 ) ) * 0xBF58476D1CE4E5B9 ) & MASK64
    x = ( ( x ^ ( x >> 27 ) ) * 0x94D049BB133111EB ) & MASK64

    return x ^ ( x >> 31 )


def mix_seed ( seed: int, *stream: int ) -> int :
    """
    Fold stream words into a seed
    Args:
        seed: Base seed (any integer, reduced mod 2^64)
        *stream: Stream words, e.g. a tag followed by an index
    Returns:
        int: Mixed unsigned 64-bit seed
    """

    h = _splitmix64( int( seed ) & MASK64 )
    for word in stream :
        h = _splitmix64( h ^ ( int( word ) & MASK64 ) )

    return h


def rng_for ( seed: int, *stream: int ) -> np.random.Generator :
    """Generator seeded from a mixed stream"""

    return np.random.default_rng( mix_seed( seed, *stream ) )
