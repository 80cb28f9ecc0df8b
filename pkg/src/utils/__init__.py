"""
LinkSched - Utils Modules
"""

from .seeding import mix_seed, rng_for

__all__ = [
    "mix_seed",
    "rng_for"
]
