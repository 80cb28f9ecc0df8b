"""
LinkSched - Channel simulation tests
"""

import math

import numpy as np
import pytest

from src.core.channel_sim import (
    ChannelRealization, Layout, ScheduleDecision, SimConfig, generate_layout, layout_from_record,
    layout_to_record, link_rates, pair_distances, pathloss_itu1411_db, pathloss_powerlaw_linear,
    realize_channel, sum_rate, sum_rates
)
from src.core.errors import ValidationError


def test_config_derived_quantities () :
    cfg = SimConfig()

    assert cfg.tx_power_watts == pytest.approx( 10.0 )
    assert cfg.noise_power == pytest.approx( 10 ** ( -19.9 ) * 5e6 )
    assert cfg.wavelength == pytest.approx( 2.998e8 / 2.4e9 )
    assert cfg.breakpoint_distance == pytest.approx( 4 * 1.5 * 1.5 / cfg.wavelength )


@pytest.mark.parametrize( "kwargs", [
    { "K": 0 }, { "d_min": 70.0 }, { "d_max": 600.0 }, { "bandwidth": 0.0 },
    { "pathloss_model": "free_space" }, { "alpha": -1.0 }, { "seed": -1 }, { "K": "abc" }, { "K": "4" }
] )
def test_config_validation ( kwargs ) :
    with pytest.raises( ValidationError ) :
        SimConfig( **kwargs )


def test_layout_is_deterministic_and_in_bounds () :
    cfg = SimConfig( seed= 42 )
    a = generate_layout( cfg, 3 )
    b = generate_layout( cfg, 3 )
    c = generate_layout( cfg, 4 )

    assert np.array_equal( a.tx, b.tx ) and np.array_equal( a.rx, b.rx )
    assert not np.array_equal( a.tx, c.tx )
    for i in range( 50 ) :
        assert generate_layout( cfg, i ).check_bounds()


def test_layout_in_small_field_stays_in_bounds () :
    cfg = SimConfig( K= 10, field_length= 70.0, seed= 1 )
    for i in range( 20 ) :
        assert generate_layout( cfg, i ).check_bounds()


def test_pair_distance_is_uniform () :
    stats = pytest.importorskip( "scipy.stats" )
    cfg = SimConfig( seed= 9 )
    d = np.concatenate( [ np.diag( pair_distances( generate_layout( cfg, i ) ) ) for i in range( 10_000 ) ] )

    assert stats.kstest( d, "uniform", args= ( cfg.d_min, cfg.d_max - cfg.d_min ) ).statistic <= 0.02


def test_layout_shape_checked () :
    with pytest.raises( ValidationError ) :
        Layout( SimConfig( K= 2 ), np.zeros( ( 3, 2 ) ), np.zeros( ( 2, 2 ) ) )


def test_itu_pathloss_slopes () :
    cfg = SimConfig()
    r_bp = cfg.breakpoint_distance
    lam = cfg.wavelength
    l_bp = abs( 20 * math.log10( lam ** 2 / ( 8 * math.pi * 1.5 ** 2 ) ) )

    assert pathloss_itu1411_db( r_bp, cfg ) == pytest.approx( l_bp )
    assert pathloss_itu1411_db( r_bp, cfg ) - pathloss_itu1411_db( r_bp / 10, cfg ) == pytest.approx( 20.0 )
    assert pathloss_itu1411_db( 10 * r_bp, cfg ) - pathloss_itu1411_db( r_bp, cfg ) == pytest.approx( 40.0 )

    arr = pathloss_itu1411_db( np.array( [ 1.0, 10.0, 100.0 ] ), cfg )
    assert arr.shape == ( 3, ) and np.all( np.diff( arr ) > 0 )


def test_pathloss_rejects_non_positive_distance () :
    with pytest.raises( ValidationError ) :
        pathloss_itu1411_db( 0.0, SimConfig() )
    with pytest.raises( ValidationError ) :
        pathloss_powerlaw_linear( np.array( [ 1.0, -2.0 ] ), 3.0 )


def test_powerlaw_gain () :
    assert pathloss_powerlaw_linear( 10.0, 3.0 ) == pytest.approx( 1e-3 )


def test_channel_without_fading_is_pathloss_only () :
    cfg = SimConfig( seed= 5 )
    layout = generate_layout( cfg, 0 )
    ch = realize_channel( layout, 123, fading= False )
    expected = 10 ** ( 2 * 2.5 / 10 ) * 10 ** ( -pathloss_itu1411_db( pair_distances( layout ), cfg ) / 10 )

    np.testing.assert_allclose( ch.gains, expected, rtol= 1e-12 )
    assert ch.noise_power == cfg.noise_power


def test_powerlaw_channel () :
    cfg = SimConfig( pathloss_model= "powerlaw", alpha= 2.0, seed= 5 )
    layout = generate_layout( cfg, 0 )
    ch = realize_channel( layout, 0, fading= False )

    np.testing.assert_allclose( ch.gains, 10 ** 0.5 * pair_distances( layout ) ** -2.0, rtol= 1e-12 )


def test_fading_is_seeded_unit_mean_exponential () :
    cfg = SimConfig( seed= 5 )
    layout = generate_layout( cfg, 0 )
    base = realize_channel( layout, 0, fading= False ).gains

    a = realize_channel( layout, 77 )
    b = realize_channel( layout, 77 )
    c = realize_channel( layout, 78 )
    assert np.array_equal( a.gains, b.gains ) and not np.array_equal( a.gains, c.gains )
    assert a.fading_seed == 77

    power = np.concatenate( [ ( realize_channel( layout, s ).gains / base ).ravel() for s in range( 2000 ) ] )
    assert power.size >= 100_000
    assert power.mean() == pytest.approx( 1.0, rel= 0.01 )
    assert power.var() == pytest.approx( 1.0, abs= 0.15 )


def test_channel_validation () :
    with pytest.raises( ValidationError ) :
        ChannelRealization( np.ones( ( 2, 3 ) ), 1.0 )
    with pytest.raises( ValidationError ) :
        ChannelRealization( np.zeros( ( 2, 2 ) ), 1.0 )
    with pytest.raises( ValidationError ) :
        ChannelRealization( np.ones( ( 2, 2 ) ), 0.0 )


def test_schedule_decision () :
    d = ScheduleDecision( [ 1, 0, 1, 1 ] )

    assert d.K == 4 and d.active_count == 3 and d.activation == 0.75
    assert d.as_list() == [ 1, 0, 1, 1 ]
    with pytest.raises( ValidationError ) :
        ScheduleDecision( [ 1, 2 ] )


def test_sum_rate_single_and_empty () :
    cfg = SimConfig( K= 3 )
    g = np.array( [ [ 1e-9, 1e-12, 1e-12 ], [ 1e-12, 2e-9, 1e-12 ], [ 1e-12, 1e-12, 3e-9 ] ] )
    ch = ChannelRealization( g, cfg.noise_power )

    assert sum_rate( ch, ScheduleDecision( [ 0, 0, 0 ] ), cfg ) == 0.0
    single = cfg.bandwidth * math.log2( 1 + cfg.tx_power_watts * 2e-9 / cfg.noise_power )
    assert sum_rate( ch, ScheduleDecision( [ 0, 1, 0 ] ), cfg ) == pytest.approx( single, rel= 1e-12 )


def test_sum_rate_is_additive_without_interference () :
    cfg = SimConfig( K= 3 )
    g = np.full( ( 3, 3 ), 1e-40 )
    np.fill_diagonal( g, [ 1e-9, 2e-9, 3e-9 ] )
    ch = ChannelRealization( g, cfg.noise_power )

    total = sum( sum_rate( ch, ScheduleDecision( np.eye( 3, dtype= int )[ q ] ), cfg ) for q in range( 3 ) )
    assert sum_rate( ch, ScheduleDecision( [ 1, 1, 1 ] ), cfg ) == pytest.approx( total, rel= 1e-12 )


def test_batched_rates_match_single_rows () :
    cfg = SimConfig( seed= 11 )
    ch = realize_channel( generate_layout( cfg, 0 ), 5 )
    rng = np.random.default_rng( 0 )
    block = ( rng.random( ( 32, cfg.K ) ) < 0.5 ).astype( np.int8 )
    rates = sum_rates( ch, block, cfg )

    for row, rate in zip( block, rates ) :
        assert sum_rate( ch, ScheduleDecision( row ), cfg ) == rate

    per_link = link_rates( ch, ScheduleDecision( block[ 0 ] ), cfg )
    assert per_link.sum() == pytest.approx( rates[ 0 ], rel= 1e-12 )
    assert np.all( per_link[ block[ 0 ] == 0 ] == 0 )

    with pytest.raises( ValidationError ) :
        sum_rates( ch, np.ones( ( 2, cfg.K + 1 ) ), cfg )


def test_interference_lowers_rate () :
    cfg = SimConfig( K= 2 )
    g = np.array( [ [ 1e-9, 1e-9 ], [ 1e-9, 1e-9 ] ] )
    ch = ChannelRealization( g, cfg.noise_power )

    both = sum_rate( ch, ScheduleDecision( [ 1, 1 ] ), cfg )
    assert both == pytest.approx( 2 * cfg.bandwidth * math.log2( 1 + 1e-8 / ( 1e-8 + cfg.noise_power ) ) )


def test_layout_record () :
    cfg = SimConfig( seed= 2 )
    layout = generate_layout( cfg, 8 )
    record = layout_to_record( layout, { "fading_seed": 99 } )
    back = layout_from_record( record, cfg )

    assert record[ "fading_seed" ] == 99 and record[ "index" ] == 8
    assert np.array_equal( back.tx, layout.tx ) and np.array_equal( back.rx, layout.rx )

    with pytest.raises( ValidationError ) :
        layout_from_record( record, SimConfig( K= 3 ) )
    with pytest.raises( ValidationError ) :
        layout_from_record( { "K": 10 }, cfg )


def test_layout_record_outside_bounds () :
    cfg = SimConfig( K= 2, field_length= 200.0 )
    record = layout_to_record( Layout( cfg, [ [ 0.0, 0.0 ], [ 100.0, 0.0 ] ], [ [ 10.0, 0.0 ], [ 110.0, 0.0 ] ] ) )
    assert layout_from_record( record, cfg ).check_bounds()

    off_field = dict( record, tx= [ [ -5.0, 0.0 ], [ 100.0, 0.0 ] ] )
    with pytest.raises( ValidationError ) :
        layout_from_record( off_field, cfg )

    too_long = dict( record, rx= [ [ 80.0, 0.0 ], [ 110.0, 0.0 ] ] )
    with pytest.raises( ValidationError ) :
        layout_from_record( too_long, cfg )

    too_short = dict( record, rx= [ [ 1.0, 0.0 ], [ 110.0, 0.0 ] ] )
    with pytest.raises( ValidationError ) :
        layout_from_record( too_short, cfg )
