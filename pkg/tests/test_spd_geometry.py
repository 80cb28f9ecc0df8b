"""
LinkSched - SPD geometry tests
"""

import math

import numpy as np
import pytest

from src.core.errors import DomainError, ValidationError
from src.core.spd_geometry import (
    KernelParams, SpdMatrix, SymMatrix, cross_gram, gram, kernel, kernel_from_lem,
    lem_sq, lem_sq_matrix, median_lem_sq, spd_log, sym_eig, sym_eig_batch, sym_exp
)

from .conftest import random_spd, random_spd_list


def test_sym_eig_reconstructs_matrix ( rng ) :
    a = rng.standard_normal( ( 7, 7 ) )
    a = a + a.T
    vals, vecs = sym_eig( a )

    assert np.all( np.diff( vals ) <= 0 )
    np.testing.assert_allclose( vecs.T @ vecs, np.eye( 7 ), atol= 1e-12 )
    np.testing.assert_allclose( ( vecs * vals ) @ vecs.T, a, atol= 1e-10 )
    np.testing.assert_allclose( vals, np.linalg.eigvalsh( a )[ ::-1 ], atol= 1e-10 )


def test_sym_eig_batch_matches_single_solves ( rng ) :
    stack = np.stack( [ random_spd( rng, 5 ) for _ in range( 6 ) ] )
    vals, vecs = sym_eig_batch( stack )

    assert vals.shape == ( 6, 5 ) and vecs.shape == ( 6, 5, 5 )
    for k in range( 6 ) :
        np.testing.assert_allclose( vals[ k ], sym_eig( stack[ k ] )[ 0 ], rtol= 1e-12 )


def test_sym_eig_odd_and_unit_sizes () :
    vals, vecs = sym_eig( np.array( [ [ 4.0 ] ] ) )
    assert vals.tolist() == [ 4.0 ] and vecs.tolist() == [ [ 1.0 ] ]

    a = np.array( [ [ 2.0, 1.0, 0.0 ], [ 1.0, 2.0, 1.0 ], [ 0.0, 1.0, 2.0 ] ] )
    vals, _ = sym_eig( a )
    np.testing.assert_allclose( vals, [ 2 + math.sqrt( 2 ), 2.0, 2 - math.sqrt( 2 ) ], atol= 1e-12 )


def test_symmetric_input_is_checked () :
    with pytest.raises( ValidationError ) :
        SymMatrix( [ [ 1.0, 2.0 ], [ 0.0, 1.0 ] ] )
    with pytest.raises( ValidationError ) :
        SymMatrix( np.ones( ( 2, 3 ) ) )
    with pytest.raises( ValidationError ) :
        SymMatrix( [ [ 1.0, np.nan ], [ np.nan, 1.0 ] ] )

    m = SymMatrix( [ [ 1.0, 2.0 + 1e-15 ], [ 2.0, 1.0 ] ] )
    assert m.entries[ 0, 1 ] == m.entries[ 1, 0 ]


def test_spd_rejects_indefinite () :
    with pytest.raises( ValidationError ) :
        SpdMatrix( [ [ 1.0, 2.0 ], [ 2.0, 1.0 ] ] )
    with pytest.raises( ValidationError ) :
        SpdMatrix.stack( [ np.eye( 2 ), np.eye( 3 ) ] )


def test_spd_log_of_diagonal () :
    s = SpdMatrix( np.diag( [ math.e, 1.0, math.e ** 2 ] ) )
    np.testing.assert_allclose( spd_log( s ).entries, np.diag( [ 1.0, 0.0, 2.0 ] ), atol= 1e-14 )


def test_spd_log_matches_scipy ( rng ) :
    linalg = pytest.importorskip( "scipy.linalg" )

    for _ in range( 5 ) :
        a = random_spd( rng, 6, cond= 1e4 )
        np.testing.assert_allclose(
            spd_log( SpdMatrix( a ) ).entries, np.real( linalg.logm( a ) ), atol= 1e-9
        )


def test_spd_log_domain_error () :
    with pytest.raises( DomainError ) :
        spd_log( SymMatrix( [ [ -1.0, 0.0 ], [ 0.0, 2.0 ] ] ) )


def test_exp_log_roundtrip ( rng ) :
    for s in random_spd_list( rng, 100, 5, cond= 1e6 ) :
        back = sym_exp( spd_log( s ) ).entries
        assert np.linalg.norm( back - s.entries ) <= 1e-8 * np.linalg.norm( s.entries )


def test_lem_sq_of_commuting_matrices () :
    a = SpdMatrix( np.diag( [ 1.0, 2.0, 3.0 ] ) )
    b = SpdMatrix( np.diag( [ 2.0, 2.0, 1.0 ] ) )
    expected = math.log( 2.0 ) ** 2 + math.log( 3.0 ) ** 2

    assert lem_sq( a, b ) == pytest.approx( expected, rel= 1e-12 )


def test_lem_metric_axioms ( rng ) :
    pts = random_spd_list( rng, 12, 4 )
    dist = np.sqrt( lem_sq_matrix( pts ) )

    assert np.all( np.diag( dist ) == 0 )
    assert np.array_equal( dist, dist.T )
    assert np.all( dist[ ~np.eye( 12, dtype= bool ) ] > 0 )
    for i in range( 12 ) :
        for j in range( 12 ) :
            assert np.all( dist[ i, j ] <= dist[ i, : ] + dist[ :, j ] + 1e-12 )

    assert lem_sq( pts[ 0 ], pts[ 1 ] ) == pytest.approx( dist[ 0, 1 ] ** 2, rel= 1e-12 )


def test_lem_dimension_mismatch () :
    with pytest.raises( ValidationError ) :
        lem_sq( SpdMatrix( np.eye( 2 ) ), SpdMatrix( np.eye( 3 ) ) )


@pytest.mark.parametrize( "gamma", [ 0.5, 1.0, 2.0, 10.0 ] )
def test_gram_is_psd ( rng, gamma ) :
    pts = random_spd_list( rng, 200, 3, cond= 50.0 )
    k = gram( pts, KernelParams( gamma ) )
    eig = np.linalg.eigvalsh( k )

    assert np.array_equal( k, k.T )
    np.testing.assert_array_equal( np.diag( k ), 1.0 )
    assert eig.min() >= -1e-8 * eig.max()


def test_kernel_values ( rng ) :
    a, b = random_spd_list( rng, 2, 4 )
    d = lem_sq( a, b )

    assert kernel( a, a, KernelParams( 2.0 ) ) == 1.0
    assert kernel( a, b, KernelParams( 2.0 ) ) == pytest.approx( math.exp( -d / 4.0 ) )
    assert kernel( a, b, KernelParams( 2.0, "literal_fourth_power" ) ) == pytest.approx( math.exp( -d * d / 4.0 ) )
    assert 0.0 < kernel( a, b, KernelParams( 2.0 ) ) < 1.0


def test_kernel_stays_positive_under_underflow () :
    assert kernel_from_lem( 1e6, KernelParams( 1e-3 ) ) > 0.0


def test_cross_gram_matches_gram ( rng ) :
    pts = random_spd_list( rng, 8, 3 )
    p = KernelParams( 1.5 )

    np.testing.assert_allclose( cross_gram( pts, pts, p ), gram( pts, p ), atol= 1e-12 )
    assert cross_gram( pts[ :3 ], pts, p ).shape == ( 3, 8 )


def test_median_lem_sq ( rng ) :
    pts = random_spd_list( rng, 5, 3 )
    dist = lem_sq_matrix( pts )

    assert median_lem_sq( pts[ :1 ] ) == 0.0
    assert median_lem_sq( pts ) == pytest.approx( np.median( dist[ np.triu_indices( 5, k= 1 ) ] ) )


def test_kernel_params_validation () :
    with pytest.raises( ValidationError ) :
        KernelParams( 0.0 )
    with pytest.raises( ValidationError ) :
        KernelParams( 1.0, "cubic" )


def test_documented_examples () :
    e = math.e

    vals, vecs = sym_eig( np.diag( [ 3.0, 1.0 ] ) )
    assert vals.tolist() == [ 3.0, 1.0 ]
    np.testing.assert_array_equal( np.abs( vecs ), np.eye( 2 ) )
    np.testing.assert_array_equal( sym_eig( np.eye( 4 ) )[ 0 ], np.ones( 4 ) )

    np.testing.assert_allclose( spd_log( SpdMatrix( np.eye( 4 ) ) ).entries, np.zeros( ( 4, 4 ) ), atol= 1e-15 )
    np.testing.assert_allclose( spd_log( SpdMatrix( e * np.eye( 3 ) ) ).entries, np.eye( 3 ), atol= 1e-15 )

    i4, ei4 = SpdMatrix( np.eye( 4 ) ), SpdMatrix( e * np.eye( 4 ) )
    assert lem_sq( i4, ei4 ) == pytest.approx( 4.0, rel= 1e-14 )
    assert kernel( i4, ei4, KernelParams( 2.0 ) ) == pytest.approx( math.exp( -1.0 ), rel= 1e-14 )

    np.testing.assert_array_equal( gram( [ i4 ], KernelParams() ), [ [ 1.0 ] ] )
    np.testing.assert_array_equal( gram( [ i4, SpdMatrix( np.eye( 4 ) ) ], KernelParams() ), np.ones( ( 2, 2 ) ) )
    with pytest.raises( ValidationError ) :
        gram( [], KernelParams() )


def test_lem_sq_matches_scalar_reference ( rng ) :
    a, b = random_spd_list( rng, 2, 4 )

    def log_ref ( m ) :
        w, u = np.linalg.eigh( m )
        return sum( math.log( w[ k ] ) * np.outer( u[ :, k ], u[ :, k ] ) for k in range( len( w ) ) )

    diff = log_ref( a.entries ) - log_ref( b.entries )
    ref = sum( float( x ) ** 2 for x in diff.ravel() )

    assert lem_sq( a, b ) == pytest.approx( ref, rel= 1e-9 )
