"""
LinkSched - Channel Simulation Module
D2D layout generation, ITU-1411 / power-law path loss, Rayleigh fading and sum rate
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import math
import numpy as np

from ..utils.seeding import FADING_STREAM, LAYOUT_STREAM, rng_for
from .errors import ValidationError

SPEED_OF_LIGHT = 2.998e8
PATHLOSS_MODELS = ( "itu1411", "powerlaw" )


@dataclass( frozen= True )
class SimConfig :
    """Network simulation parameters (defaults follow the D2D benchmark setup)"""

    K: int = 10
    field_length: float = 500.0
    d_min: float = 2.0
    d_max: float = 65.0
    carrier_freq: float = 2.4e9
    bandwidth: float = 5e6
    tx_power_dbm: float = 40.0
    antenna_height: float = 1.5
    antenna_gain_db: float = 2.5
    noise_psd_dbm_hz: float = -169.0
    pathloss_model: str = "itu1411"
    alpha: float = 3.0
    seed: int = 0

    def __post_init__ ( self ) :
        if isinstance( self.K, ( str, bool ) ) or int( self.K ) != self.K or self.K < 1 :
            raise ValidationError( f"K must be a positive integer, got {self.K}" )
        if not 0 < self.d_min < self.d_max < self.field_length :
            raise ValidationError(
                "need 0 < d_min < d_max < field_length, got "
                f"{self.d_min}, {self.d_max}, {self.field_length}"
            )
        if self.bandwidth <= 0 or self.carrier_freq <= 0 or self.antenna_height <= 0 :
            raise ValidationError( "bandwidth, carrier_freq and antenna_height must be > 0" )
        if self.pathloss_model not in PATHLOSS_MODELS :
            raise ValidationError(
                f"pathloss_model must be one of {PATHLOSS_MODELS}, got {self.pathloss_model!r}"
            )
        if self.alpha <= 0 :
            raise ValidationError( f"alpha must be > 0, got {self.alpha}" )
        if not 0 <= int( self.seed ) < 2 ** 64 :
            raise ValidationError( f"seed must be an unsigned 64-bit integer, got {self.seed}" )


    @property
    def tx_power_watts ( self ) -> float :
        """Transmit power p in watts"""

        return 10 ** ( ( self.tx_power_dbm - 30 ) / 10 )


    @property
    def noise_power ( self ) -> float :
        """Noise power sigma^2 in watts over the whole bandwidth"""

        return 10 ** ( ( self.noise_psd_dbm_hz - 30 ) / 10 ) * self.bandwidth


    @property
    def wavelength ( self ) -> float :
        return SPEED_OF_LIGHT / self.carrier_freq


    @property
    def breakpoint_distance ( self ) -> float :
        """R_bp = 4 h_tx h_rx / lambda"""

        return 4 * self.antenna_height * self.antenna_height / self.wavelength


@dataclass( frozen= True, eq= False )
class Layout :
    """Transmitter / receiver positions of K D2D pairs"""

    config: SimConfig
    tx: np.ndarray
    rx: np.ndarray
    index: int = 0

    def __post_init__ ( self ) :
        tx = np.array( self.tx, dtype= float )
        rx = np.array( self.rx, dtype= float )
        k = self.config.K

        if tx.shape != ( k, 2 ) or rx.shape != ( k, 2 ) :
            raise ValidationError( f"expected tx/rx of shape ({k}, 2), got {tx.shape} / {rx.shape}" )

        tx.setflags( write= False )
        rx.setflags( write= False )
        object.__setattr__( self, "tx", tx )
        object.__setattr__( self, "rx", rx )


    @property
    def K ( self ) -> int :
        return self.config.K


    def check_bounds ( self, slack: float = 1e-9 ) -> bool :
        """True when every node is on the field and every pair distance in [d_min, d_max]"""

        cfg = self.config
        points = np.concatenate( [ self.tx, self.rx ] )
        on_field = bool( np.all( ( points >= 0 ) & ( points <= cfg.field_length ) ) )
        d = np.linalg.norm( self.tx - self.rx, axis= 1 )

        return on_field and bool(
            np.all( d >= cfg.d_min - slack ) and np.all( d <= cfg.d_max + slack )
        )


@dataclass( frozen= True, eq= False )
class ChannelRealization :
    """Linear power gains gains[i][q] from transmitter i to receiver q, plus noise power"""

    gains: np.ndarray
    noise_power: float
    fading_seed: Optional[ int ] = None

    def __post_init__ ( self ) :
        g = np.array( self.gains, dtype= float )

        if g.ndim != 2 or g.shape[ 0 ] != g.shape[ 1 ] :
            raise ValidationError( f"gain matrix must be square, got shape {g.shape}" )
        if not np.all( np.isfinite( g ) ) or not np.all( g > 0 ) :
            raise ValidationError( "gains must be finite and > 0" )
        if not self.noise_power > 0 :
            raise ValidationError( f"noise power must be > 0, got {self.noise_power}" )

        g.setflags( write= False )
        object.__setattr__( self, "gains", g )


    @property
    def K ( self ) -> int :
        return self.gains.shape[ 0 ]


    def direct_snr ( self, cfg: SimConfig ) -> np.ndarray :
        """Direct-link SNR p g_qq / sigma^2 of every pair"""

        return cfg.tx_power_watts * np.diag( self.gains ) / self.noise_power


@dataclass( frozen= True, eq= False )
class ScheduleDecision :
    """Binary activation vector d"""

    d: np.ndarray = field( default_factory= lambda: np.zeros( 0, dtype= np.int8 ) )

    def __post_init__ ( self ) :
        d = np.array( self.d )

        if d.ndim != 1 or not np.all( ( d == 0 ) | ( d == 1 ) ) :
            raise ValidationError( f"activation vector must be a 1-D 0/1 vector, got {d!r}" )

        d = d.astype( np.int8 )
        d.setflags( write= False )
        object.__setattr__( self, "d", d )


    @property
    def K ( self ) -> int :
        return self.d.shape[ 0 ]


    @property
    def active_count ( self ) -> int :
        return int( self.d.sum() )


    @property
    def activation ( self ) -> float :
        """Fraction of active links (0 for an empty vector)"""

        return self.active_count / self.K if self.K else 0.0


    def as_list ( self ) -> list :
        return [ int( x ) for x in self.d ]


def generate_layout ( cfg: SimConfig, layout_index: int ) -> Layout :
    """
    Random layout: transmitters uniform on the square, receivers at a uniform
    radius in [d_min, d_max] and uniform angle around their transmitter
    """

    rng = rng_for( cfg.seed, LAYOUT_STREAM, layout_index )
    k = cfg.K
    length = cfg.field_length

    tx = rng.uniform( 0.0, length, size= ( k, 2 ) )
    radius = rng.uniform( cfg.d_min, cfg.d_max, size= k )
    angle = rng.uniform( 0.0, 2 * math.pi, size= k )
    rx = np.empty_like( tx )

    # radius is kept and only the angle is redrawn for receivers off the field,
    # unless the circle misses the field entirely (d_max > field_length / sqrt(2));
    # a transmitter farther than d_min from every corner is redrawn as well
    corners = np.array( [ [ 0.0, 0.0 ], [ 0.0, length ], [ length, 0.0 ], [ length, length ] ] )
    while True :
        reach = np.max( np.linalg.norm( tx[ :, np.newaxis, : ] - corners[ np.newaxis ], axis= 2 ), axis= 1 )
        far = radius > reach
        if not far.any() :
            break
        stuck = far & ( reach <= cfg.d_min )
        tx[ stuck ] = rng.uniform( 0.0, length, size= ( int( stuck.sum() ), 2 ) )
        radius[ far ] = rng.uniform( cfg.d_min, cfg.d_max, size= int( far.sum() ) )

    pending = np.arange( k )
    while pending.size :
        rx[ pending, 0 ] = tx[ pending, 0 ] + radius[ pending ] * np.cos( angle[ pending ] )
        rx[ pending, 1 ] = tx[ pending, 1 ] + radius[ pending ] * np.sin( angle[ pending ] )
        outside = np.any( ( rx[ pending ] < 0 ) | ( rx[ pending ] > length ), axis= 1 )
        pending = pending[ outside ]
        angle[ pending ] = rng.uniform( 0.0, 2 * math.pi, size= pending.size )

    return Layout( cfg, tx, rx, layout_index )


def pair_distances ( layout: Layout ) -> np.ndarray :
    """K x K matrix of distances ||tx_i - rx_q||"""

    diff = layout.tx[ :, np.newaxis, : ] - layout.rx[ np.newaxis, :, : ]
    return np.sqrt( np.sum( diff * diff, axis= 2 ) )


def _check_distance ( dist ) -> np.ndarray :
    d = np.asarray( dist, dtype= float )
    if np.any( ~( d > 0 ) ) :
        raise ValidationError( "path loss needs distances > 0" )
    return d


def pathloss_itu1411_db ( dist, cfg: SimConfig ) :
    """
    ITU-R P.1411 line-of-sight lower bound path loss in dB
    Args:
        dist: Distance(s) in meters, scalar or array
        cfg: Simulation config (carrier frequency, antenna heights)
    """

    d = _check_distance( dist )
    lam = cfg.wavelength
    h = cfg.antenna_height
    r_bp = cfg.breakpoint_distance
    l_bp = abs( 20 * math.log10( lam * lam / ( 8 * math.pi * h * h ) ) )

    ratio = 20 * np.log10( d / r_bp )
    loss = np.where( d <= r_bp, l_bp + ratio, l_bp + 2 * ratio )

    return float( loss ) if loss.ndim == 0 else loss


def pathloss_powerlaw_linear ( dist, alpha: float ) :
    """Linear power-law gain dist^(-alpha)"""

    d = _check_distance( dist )
    if alpha <= 0 :
        raise ValidationError( f"alpha must be > 0, got {alpha}" )

    gain = np.power( d, -alpha )

    return float( gain ) if gain.ndim == 0 else gain


def realize_channel (
    layout: Layout, fading_seed: int, fading: bool = True
) -> ChannelRealization :
    """
    Channel gains with path loss, both antenna gains and i.i.d. unit-mean
    exponential |h|^2 (Rayleigh); fading=False fixes |h|^2 = 1
    """

    cfg = layout.config
    dist = pair_distances( layout )
    antenna = 10 ** ( 2 * cfg.antenna_gain_db / 10 )

    if cfg.pathloss_model == "itu1411" :
        path_gain = np.power( 10.0, -pathloss_itu1411_db( dist, cfg ) / 10 )
    else :
        path_gain = pathloss_powerlaw_linear( dist, cfg.alpha )

    if fading :
        rng = rng_for( fading_seed, FADING_STREAM )
        power = rng.exponential( 1.0, size= dist.shape )
    else :
        power = np.ones_like( dist )

    return ChannelRealization( antenna * path_gain * power, cfg.noise_power, fading_seed )


def sum_rates ( ch: ChannelRealization, decisions: np.ndarray, cfg: SimConfig ) -> np.ndarray :
    """
    Sum rate (bit/s) of many activation vectors at once
    Args:
        ch: Channel realization
        decisions: Array (M, K) of 0/1 activation vectors
        cfg: Simulation config (bandwidth, transmit power)
    """

    d = np.asarray( decisions, dtype= float )
    if d.ndim != 2 or d.shape[ 1 ] != ch.K :
        raise ValidationError( f"decisions must have shape (M, {ch.K}), got {d.shape}" )

    p = cfg.tx_power_watts
    direct = np.diag( ch.gains )
    cross = ch.gains * ( 1.0 - np.eye( ch.K ) )

    # interference[m, q] = sum_i p d_i g_iq over i != q
    interference = np.sum( d[ :, :, np.newaxis ] * ( p * cross )[ np.newaxis, :, : ], axis= 1 )
    sinr = p * d * direct / ( interference + ch.noise_power )

    return cfg.bandwidth * np.sum( np.log2( 1.0 + sinr ), axis= 1 )


def sum_rate ( ch: ChannelRealization, d: ScheduleDecision, cfg: SimConfig ) -> float :
    """Sum rate (bit/s) of one activation vector"""

    return float( sum_rates( ch, d.d[ np.newaxis, : ], cfg )[ 0 ] )


def link_rates ( ch: ChannelRealization, d: ScheduleDecision, cfg: SimConfig ) -> np.ndarray :
    """Per-link rates (bit/s) of one activation vector"""

    p = cfg.tx_power_watts
    x = d.d.astype( float )
    cross = ch.gains * ( 1.0 - np.eye( ch.K ) )
    interference = ( p * x ) @ cross
    sinr = p * x * np.diag( ch.gains ) / ( interference + ch.noise_power )

    return cfg.bandwidth * np.log2( 1.0 + sinr )


def layout_to_record ( layout: Layout, extra: Optional[ Dict ] = None ) -> Dict :
    """JSON Lines record of a layout"""

    record = {
        "index": int( layout.index ),
        "field_length": float( layout.config.field_length ),
        "K": int( layout.K ),
        "tx": [ [ float( x ), float( y ) ] for x, y in layout.tx ],
        "rx": [ [ float( x ), float( y ) ] for x, y in layout.rx ],
    }
    if extra :
        record.update( extra )

    return record


def layout_from_record ( record: Dict, cfg: SimConfig ) -> Layout :
    """Rebuild a layout from its JSON Lines record"""

    try :
        k = int( record[ "K" ] )
        length = float( record[ "field_length" ] )
        tx, rx, index = record[ "tx" ], record[ "rx" ], int( record[ "index" ] )
    except ( KeyError, TypeError, ValueError ) as e :
        raise ValidationError( f"malformed layout record: {e}" ) from e

    if k != cfg.K or length != cfg.field_length :
        raise ValidationError(
            f"layout record (K={k}, field={length}) does not match config "
            f"(K={cfg.K}, field={cfg.field_length})"
        )

    layout = Layout( cfg, tx, rx, index )
    if not layout.check_bounds() :
        raise ValidationError(
            f"layout {index} has a node off the field or a pair distance outside "
            f"[{cfg.d_min}, {cfg.d_max}]"
        )

    return layout
