"""
LinkSched - Graph Embedding Module
Per-link incidence / weight / Laplacian matrices of the communication,
received-interference and caused-interference graphs, regularised to SPD
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .channel_sim import Layout, pair_distances
from .errors import ValidationError
from .spd_geometry import SpdMatrix, SymMatrix

WEIGHT_NORMALIZATIONS = ( "none", "divide_by_field_length" )

Edge = Tuple[ int, int ]


@dataclass( frozen= True )
class EmbeddingConfig :
    """Regularisation and edge-weight scaling of the link embedding"""

    gamma_reg: float = 1e-2
    weight_normalization: str = "divide_by_field_length"

    def __post_init__ ( self ) :
        if not np.isfinite( self.gamma_reg ) or self.gamma_reg <= 0 :
            raise ValidationError( f"gamma_reg must be > 0, got {self.gamma_reg}" )
        if self.weight_normalization not in WEIGHT_NORMALIZATIONS :
            raise ValidationError(
                f"weight_normalization must be one of {WEIGHT_NORMALIZATIONS}, "
                f"got {self.weight_normalization!r}"
            )


RAW_WEIGHTS = EmbeddingConfig( weight_normalization= "none" )


@dataclass( frozen= True, eq= False )
class IncidenceMatrix :
    """Node x edge matrix, +1 at the source (transmitter) and -1 at the destination (receiver)"""

    n: int
    edges: Tuple[ Edge, ... ]

    def __post_init__ ( self ) :
        for src, dst in self.edges :
            if src == dst or not ( 0 <= src < self.n and 0 <= dst < self.n ) :
                raise ValidationError( f"invalid edge ({src}, {dst}) for {self.n} nodes" )


    @property
    def m_edges ( self ) -> int :
        return len( self.edges )


    @property
    def entries ( self ) -> np.ndarray :
        a = np.zeros( ( self.n, self.m_edges ) )
        for col, ( src, dst ) in enumerate( self.edges ) :
            a[ src, col ] = 1.0
            a[ dst, col ] = -1.0
        return a


    def laplacian ( self, weights: np.ndarray ) -> np.ndarray :
        """A W A^T as a matrix product"""

        a = self.entries
        return a @ np.diag( np.asarray( weights, dtype= float ) ) @ a.T


    def laplacian_by_edges ( self, weights: np.ndarray ) -> np.ndarray :
        """A W A^T accumulated edge by edge as sum_l w_l a_l a_l^T"""

        a = self.entries
        out = np.zeros( ( self.n, self.n ) )
        for col, w in enumerate( weights ) :
            out += w * np.outer( a[ :, col ], a[ :, col ] )
        return out


@dataclass( frozen= True, eq= False )
class LinkEmbedding :
    """Regularised Laplacians of one D2D pair and their sum S_Dq"""

    pair_index: int
    s_com: SpdMatrix
    s_int: SpdMatrix
    s_nbr: SpdMatrix
    s_dq: SpdMatrix


def tx_node ( q: int ) -> int :
    return 2 * q


def rx_node ( q: int ) -> int :
    return 2 * q + 1


def _check_pair ( layout: Layout, q: int ) -> None :
    if not 0 <= q < layout.K :
        raise ValidationError( f"pair index {q} out of range for K={layout.K}" )


def _weights ( layout: Layout, pairs: Sequence[ Tuple[ int, int ] ], cfg: EmbeddingConfig ) -> np.ndarray :
    """Edge weights: distance tx_i -> rx_j for every (i, j), optionally normalised"""

    dist = pair_distances( layout )
    w = np.array( [ dist[ i, j ] for i, j in pairs ], dtype= float )

    if cfg.weight_normalization == "divide_by_field_length" :
        w = w / layout.config.field_length

    return w


def incidence_com (
    layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig()
) -> Tuple[ IncidenceMatrix, np.ndarray ] :
    """Single direct link tx_q -> rx_q"""

    _check_pair( layout, q )
    pairs = [ ( q, q ) ]

    return (
        IncidenceMatrix( 2 * layout.K, tuple( ( tx_node( i ), rx_node( j ) ) for i, j in pairs ) ),
        _weights( layout, pairs, cfg )
    )


def incidence_int (
    layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig()
) -> Tuple[ IncidenceMatrix, np.ndarray ] :
    """Interference received by pair q: tx_i -> rx_q for every i != q"""

    _check_pair( layout, q )
    pairs = [ ( i, q ) for i in range( layout.K ) if i != q ]

    return (
        IncidenceMatrix( 2 * layout.K, tuple( ( tx_node( i ), rx_node( j ) ) for i, j in pairs ) ),
        _weights( layout, pairs, cfg )
    )


def incidence_nbr (
    layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig()
) -> Tuple[ IncidenceMatrix, np.ndarray ] :
    """
    Neighbourhood of pair q: every neighbour direct link tx_i -> rx_i followed
    by the interference tx_q -> rx_i it would cause, for i != q (2K - 2 edges)
    """

    _check_pair( layout, q )
    pairs = []
    for i in range( layout.K ) :
        if i != q :
            pairs.append( ( i, i ) )
            pairs.append( ( q, i ) )

    return (
        IncidenceMatrix( 2 * layout.K, tuple( ( tx_node( i ), rx_node( j ) ) for i, j in pairs ) ),
        _weights( layout, pairs, cfg )
    )


def laplacian_com ( layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig() ) -> SymMatrix :
    """L_com = A_com W_com A_com^T (rank 1)"""

    a, w = incidence_com( layout, q, cfg )
    return SymMatrix( a.laplacian( w ) )


def laplacian_int ( layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig() ) -> SymMatrix :
    """L_int over the K - 1 received-interference edges; zero matrix when K = 1"""

    a, w = incidence_int( layout, q, cfg )
    return SymMatrix( a.laplacian( w ) )


def laplacian_nbr ( layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig() ) -> SymMatrix :
    """L_nbr over neighbour direct links and caused-interference edges; zero matrix when K = 1"""

    a, w = incidence_nbr( layout, q, cfg )
    return SymMatrix( a.laplacian( w ) )


def _shifted ( layout: Layout, q: int, cfg: EmbeddingConfig ) -> List[ np.ndarray ] :
    """S_com, S_int, S_nbr and their sum as plain arrays"""

    shift = cfg.gamma_reg * np.eye( 2 * layout.K )
    parts = [
        laplacian_com( layout, q, cfg ).entries + shift,
        laplacian_int( layout, q, cfg ).entries + shift,
        laplacian_nbr( layout, q, cfg ).entries + shift,
    ]

    return parts + [ parts[ 0 ] + parts[ 1 ] + parts[ 2 ] ]


def embed_link ( layout: Layout, q: int, cfg: EmbeddingConfig = EmbeddingConfig() ) -> LinkEmbedding :
    """S_x = L_x + gamma_reg I for x in (com, int, nbr) and S_Dq = S_com + S_int + S_nbr"""

    _check_pair( layout, q )
    s_com, s_int, s_nbr, s_dq = SpdMatrix.stack( _shifted( layout, q, cfg ) )

    return LinkEmbedding( q, s_com, s_int, s_nbr, s_dq )


def embed_layout (
    layout: Layout, cfg: EmbeddingConfig = EmbeddingConfig()
) -> List[ LinkEmbedding ] :
    """Embeddings of all K links in pair order, validated with one batched eigen-solve"""

    arrays = []
    for q in range( layout.K ) :
        arrays.extend( _shifted( layout, q, cfg ) )

    spd = SpdMatrix.stack( arrays )

    return [
        LinkEmbedding( q, *spd[ 4 * q: 4 * q + 4 ] )
        for q in range( layout.K )
    ]


def embedding_points ( embeddings: Sequence[ LinkEmbedding ] ) -> List[ SpdMatrix ] :
    """The S_Dq manifold points of a list of embeddings"""

    return [ e.s_dq for e in embeddings ]
