"""
LinkSched - Baseline Schedulers Module
Exact exhaustive oracle, greedy, strongest-link, random and all-active schedulers
"""

from typing import Callable, Dict, Iterator, Tuple

import logging
import numpy as np

from ..utils.seeding import RANDOM_STREAM, rng_for
from .channel_sim import ChannelRealization, ScheduleDecision, SimConfig, sum_rate, sum_rates
from .errors import CapacityError, ValidationError

logger = logging.getLogger( __name__ )

MAX_EXHAUSTIVE_K = 25
ENUMERATION_CHUNK = 4096


def _activation_block ( start: int, stop: int, k: int ) -> np.ndarray :
    """Rows m in [start, stop) as activation vectors, bit q of m is d_q"""

    m = np.arange( start, stop, dtype= np.int64 )
    return ( ( m[ :, np.newaxis ] >> np.arange( k, dtype= np.int64 ) ) & 1 ).astype( np.int8 )


def _tie_break ( candidates: np.ndarray ) -> np.ndarray :
    """Fewest active links first, then lexicographically smallest d"""

    counts = candidates.sum( axis= 1 )
    keys = [ candidates[ :, q ] for q in range( candidates.shape[ 1 ] - 1, -1, -1 ) ] + [ counts ]

    return candidates[ np.lexsort( keys )[ 0 ] ]


def exhaustive_optimal (
    ch: ChannelRealization, cfg: SimConfig
) -> Tuple[ ScheduleDecision, float ] :
    """
    Exact sum-rate maximiser over all 2^K activation vectors
    Returns:
        Tuple[ ScheduleDecision, float ]: best decision and its sum rate
    """

    k = ch.K
    if k > MAX_EXHAUSTIVE_K :
        raise CapacityError(
            f"exhaustive search is limited to K <= {MAX_EXHAUSTIVE_K} (got K={k}); "
            "use the greedy scheduler instead"
        )

    best_rate = -np.inf
    best_rows = np.zeros( ( 0, k ), dtype= np.int8 )

    for start in range( 0, 2 ** k, ENUMERATION_CHUNK ) :
        block = _activation_block( start, min( start + ENUMERATION_CHUNK, 2 ** k ), k )
        rates = sum_rates( ch, block, cfg )
        top = rates.max()

        if top > best_rate :
            best_rate = top
            best_rows = block[ rates == top ]
        elif top == best_rate :
            best_rows = np.concatenate( [ best_rows, block[ rates == top ] ] )

    decision = ScheduleDecision( _tie_break( best_rows ) )

    return decision, float( best_rate )


def greedy_steps (
    ch: ChannelRealization, cfg: SimConfig
) -> Iterator[ Tuple[ ScheduleDecision, float ] ] :
    """
    Greedy link addition in descending direct-SNR order; yields the schedule
    and its sum rate after the first link and after every accepted link
    """

    order = np.argsort( -ch.direct_snr( cfg ), kind= "stable" )
    d = np.zeros( ch.K, dtype= np.int8 )
    if ch.K == 0 :
        return

    d[ order[ 0 ] ] = 1
    current = sum_rate( ch, ScheduleDecision( d ), cfg )
    yield ScheduleDecision( d ), current

    for q in order[ 1: ] :
        trial = d.copy()
        trial[ q ] = 1
        rate = sum_rate( ch, ScheduleDecision( trial ), cfg )

        if rate >= current :
            d, current = trial, rate
            yield ScheduleDecision( d ), current


def greedy ( ch: ChannelRealization, cfg: SimConfig ) -> ScheduleDecision :
    """Greedy schedule: add a link only if the sum rate does not drop"""

    decision = ScheduleDecision( np.zeros( ch.K, dtype= np.int8 ) )
    for decision, _ in greedy_steps( ch, cfg ) :
        pass

    return decision


def strongest_link ( ch: ChannelRealization, cfg: SimConfig ) -> ScheduleDecision :
    """Only the link with the largest direct SNR (smallest index on ties)"""

    d = np.zeros( ch.K, dtype= np.int8 )
    d[ int( np.argmax( ch.direct_snr( cfg ) ) ) ] = 1

    return ScheduleDecision( d )


def random_schedule ( K: int, seed: int ) -> ScheduleDecision :
    """Every link active independently with probability 1/2"""

    if K < 0 :
        raise ValidationError( f"K must be >= 0, got {K}" )

    rng = rng_for( seed, RANDOM_STREAM )

    return ScheduleDecision( ( rng.random( K ) < 0.5 ).astype( np.int8 ) )


def all_active ( K: int ) -> ScheduleDecision :
    """Every link active"""

    return ScheduleDecision( np.ones( K, dtype= np.int8 ) )


SchemeFn = Callable[ [ ChannelRealization, SimConfig, int ], ScheduleDecision ]

# Uniform (channel, config, seed) signature for the harness
SCHEMES: Dict[ str, SchemeFn ] = {
    "exhaustive": lambda ch, cfg, seed : exhaustive_optimal( ch, cfg )[ 0 ],
    "greedy": lambda ch, cfg, seed : greedy( ch, cfg ),
    "strongest": lambda ch, cfg, seed : strongest_link( ch, cfg ),
    "random": lambda ch, cfg, seed : random_schedule( ch.K, seed ),
    "all_active": lambda ch, cfg, seed : all_active( ch.K ),
}
