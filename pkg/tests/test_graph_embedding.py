"""
LinkSched - Graph embedding tests
"""

import numpy as np
import pytest

from src.core.channel_sim import Layout, SimConfig, generate_layout
from src.core.errors import ValidationError
from src.core.graph_embedding import (
    RAW_WEIGHTS, EmbeddingConfig, IncidenceMatrix, embed_layout, embed_link, embedding_points,
    incidence_com, incidence_int, incidence_nbr, laplacian_com, laplacian_int, laplacian_nbr
)
from src.core.spd_geometry import lem_sq

LAPLACIANS = ( laplacian_com, laplacian_int, laplacian_nbr )


def test_two_pair_embedding_by_hand ( two_pair_layout ) :
    cfg = EmbeddingConfig( gamma_reg= 0.01, weight_normalization= "none" )
    s = embed_link( two_pair_layout, 0, cfg ).s_dq.entries

    expected = np.array( [
        [ 120.0, -10.0, 0.0, -110.0 ],
        [ -10.0, 100.0, -90.0, 0.0 ],
        [ 0.0, -90.0, 100.0, -10.0 ],
        [ -110.0, 0.0, -10.0, 120.0 ],
    ] ) + 0.03 * np.eye( 4 )

    np.testing.assert_allclose( s, expected, rtol= 0, atol= 1e-12 )


def test_two_pair_parts ( two_pair_layout ) :
    com = laplacian_com( two_pair_layout, 1, RAW_WEIGHTS ).entries
    np.testing.assert_allclose( com[ 2:, 2: ], [ [ 10.0, -10.0 ], [ -10.0, 10.0 ] ], atol= 1e-12 )
    assert np.count_nonzero( com[ :2 ] ) == 0

    normalized = laplacian_com( two_pair_layout, 1 ).entries
    np.testing.assert_allclose( normalized, com / 200.0, atol= 1e-15 )


def test_laplacians_are_psd_with_zero_row_sums () :
    cfg = SimConfig( seed= 3 )
    for i in range( 100 ) :
        layout = generate_layout( cfg, i )
        for q in range( layout.K ) :
            for fn in LAPLACIANS :
                lap = fn( layout, q ).entries
                scale = max( 1.0, np.abs( lap ).max() )
                np.testing.assert_allclose( lap.sum( axis= 1 ), 0.0, atol= 1e-12 * scale )
                assert np.linalg.eigvalsh( lap ).min() >= -1e-12 * scale


def test_shift_identity () :
    cfg = EmbeddingConfig( gamma_reg= 0.05 )
    layout = generate_layout( SimConfig( seed= 4 ), 0 )

    for emb in embed_layout( layout, cfg ) :
        q = emb.pair_index
        total = sum( fn( layout, q, cfg ).entries for fn in LAPLACIANS )
        np.testing.assert_allclose(
            emb.s_dq.entries - total, 3 * 0.05 * np.eye( 2 * layout.K ), rtol= 0, atol= 1e-12
        )
        np.testing.assert_allclose(
            emb.s_com.entries - laplacian_com( layout, q, cfg ).entries, 0.05 * np.eye( 2 * layout.K ), atol= 1e-12
        )


def _moved ( layout: Layout, angle: float, shift ) -> Layout :
    rot = np.array( [ [ np.cos( angle ), -np.sin( angle ) ], [ np.sin( angle ), np.cos( angle ) ] ] )
    return Layout( layout.config, layout.tx @ rot.T + shift, layout.rx @ rot.T + shift, layout.index )


def test_translation_and_rotation_invariance () :
    layout = generate_layout( SimConfig( seed= 8 ), 2 )
    moved = _moved( layout, 0.7, np.array( [ 31.0, -12.5 ] ) )

    for a, b in zip( embed_layout( layout ), embed_layout( moved ) ) :
        np.testing.assert_allclose( a.s_dq.entries, b.s_dq.entries, rtol= 0, atol= 1e-9 )


def test_incidence_structure () :
    layout = generate_layout( SimConfig( K= 5, seed= 1 ), 0 )

    for fn, edges in ( ( incidence_com, 1 ), ( incidence_int, 4 ), ( incidence_nbr, 8 ) ) :
        inc, w = fn( layout, 2 )
        a = inc.entries

        assert a.shape == ( 10, edges ) and w.shape == ( edges, )
        np.testing.assert_array_equal( a.sum( axis= 0 ), 0.0 )
        np.testing.assert_array_equal( ( a == 1 ).sum( axis= 0 ), 1 )
        np.testing.assert_array_equal( ( a == -1 ).sum( axis= 0 ), 1 )
        np.testing.assert_allclose( inc.laplacian( w ), inc.laplacian_by_edges( w ), atol= 1e-14 )

    # transmitters are even nodes, receivers odd
    inc, _ = incidence_nbr( layout, 2 )
    assert inc.edges[ :2 ] == ( ( 0, 1 ), ( 4, 1 ) )


def test_incidence_rejects_bad_edges () :
    with pytest.raises( ValidationError ) :
        IncidenceMatrix( 4, ( ( 0, 0 ), ) )
    with pytest.raises( ValidationError ) :
        IncidenceMatrix( 4, ( ( 0, 4 ), ) )


def test_single_pair_has_only_the_direct_link () :
    cfg = SimConfig( K= 1, seed= 2 )
    layout = generate_layout( cfg, 0 )

    assert np.count_nonzero( laplacian_int( layout, 0 ).entries ) == 0
    assert np.count_nonzero( laplacian_nbr( layout, 0 ).entries ) == 0

    emb = embed_link( layout, 0 )
    np.testing.assert_allclose(
        emb.s_dq.entries, laplacian_com( layout, 0 ).entries + 0.03 * np.eye( 2 ), atol= 1e-15
    )


def test_embed_layout_matches_embed_link () :
    layout = generate_layout( SimConfig( K= 4, seed= 6 ), 1 )
    batch = embed_layout( layout )

    assert [ e.pair_index for e in batch ] == [ 0, 1, 2, 3 ]
    for q, e in enumerate( batch ) :
        np.testing.assert_array_equal( e.s_dq.entries, embed_link( layout, q ).s_dq.entries )
    assert len( embedding_points( batch ) ) == 4


def test_bad_pair_index_and_config () :
    layout = generate_layout( SimConfig( K= 3 ), 0 )

    with pytest.raises( ValidationError ) :
        embed_link( layout, 3 )
    with pytest.raises( ValidationError ) :
        laplacian_int( layout, -1 )
    with pytest.raises( ValidationError ) :
        EmbeddingConfig( gamma_reg= 0.0 )
    with pytest.raises( ValidationError ) :
        EmbeddingConfig( weight_normalization= "log" )


def test_relabeling_pairs_permutes_nodes () :
    layout = generate_layout( SimConfig( K= 6, seed= 12 ), 0 )
    perm = np.array( [ 3, 0, 5, 1, 4, 2 ] )
    relabeled = Layout( layout.config, layout.tx[ perm ], layout.rx[ perm ], layout.index )

    nodes = np.empty( 2 * layout.K, dtype= int )
    nodes[ 0::2 ] = 2 * perm
    nodes[ 1::2 ] = 2 * perm + 1

    before = embed_layout( layout )
    after = embed_layout( relabeled )

    for p in range( layout.K ) :
        expected = before[ perm[ p ] ].s_dq.entries[ np.ix_( nodes, nodes ) ]
        np.testing.assert_allclose( after[ p ].s_dq.entries, expected, rtol= 0, atol= 1e-9 )

    # Log-Euclidean distances do not see the relabeling
    assert lem_sq( after[ 0 ].s_dq, after[ 1 ].s_dq ) == pytest.approx(
        lem_sq( before[ perm[ 0 ] ].s_dq, before[ perm[ 1 ] ].s_dq ), rel= 1e-8
    )


def test_mirror_pairs_have_equal_embeddings ( two_pair_layout ) :
    s0, s1 = embedding_points( embed_layout( two_pair_layout ) )

    assert lem_sq( s0, s1 ) <= 1e-9
