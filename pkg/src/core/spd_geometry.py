"""
LinkSched - SPD Geometry Module
Symmetric / SPD matrix types, cyclic Jacobi eigen-solver, matrix logarithm,
Log-Euclidean distance and the Gaussian Log-Euclidean graph kernel
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import logging
import numpy as np

from .errors import DomainError, NumericalError, ValidationError

logger = logging.getLogger( __name__ )

SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
KERNEL_EXPONENTS = ( "squared_norm", "literal_fourth_power" )

Eigenpairs = Tuple[ np.ndarray, np.ndarray ]


def _as_square ( entries ) -> np.ndarray :
    """Copy entries into a finite, square float array"""

    a = np.array( entries, dtype= float )

    if a.ndim != 2 or a.shape[ 0 ] != a.shape[ 1 ] or a.shape[ 0 ] == 0 :
        raise ValidationError( f"expected a non-empty square matrix, got shape {a.shape}" )
    if not np.all( np.isfinite( a ) ) :
        raise ValidationError( "matrix has non-finite entries" )

    return a


def _symmetrize ( a: np.ndarray ) -> np.ndarray :
    """Absorb floating-point asymmetry; reject anything above tolerance"""

    scale = max( 1.0, float( np.max( np.abs( a ) ) ) )
    asym = float( np.max( np.abs( a - a.T ) ) )

    if asym > SYMMETRY_TOL * scale :
        raise ValidationError( f"matrix is not symmetric (max |a_ij - a_ji| = {asym:.3e})" )

    return ( a + a.T ) / 2


@dataclass( frozen= True, eq= False )
class SymMatrix :
    """Symmetric real matrix; eigenvalues unconstrained"""

    entries: np.ndarray
    eig_cache: Optional[ Eigenpairs ] = field( default= None, repr= False )

    def __post_init__ ( self ) :
        a = _symmetrize( _as_square( self.entries ) )
        a.setflags( write= False )
        object.__setattr__( self, "entries", a )


    @property
    def dim ( self ) -> int :
        """Matrix dimension n"""

        return self.entries.shape[ 0 ]


    def eig ( self ) -> Eigenpairs :
        """Eigenvalues (descending) and orthonormal eigenvectors, computed once"""

        if self.eig_cache is None :
            vals, vecs = sym_eig_batch( self.entries[ np.newaxis ] )
            object.__setattr__( self, "eig_cache", ( vals[ 0 ], vecs[ 0 ] ) )

        return self.eig_cache


@dataclass( frozen= True, eq= False )
class SpdMatrix ( SymMatrix ) :
    """Symmetric positive definite matrix, a point of Sym_n^++"""

    log_cache: Optional[ np.ndarray ] = field( default= None, init= False, repr= False )

    def __post_init__ ( self ) :
        super().__post_init__()

        vals, _ = self.eig()
        if not vals[ -1 ] > 0.0 :
            raise ValidationError(
                f"matrix is not positive definite (min eigenvalue {vals[ -1 ]:.3e})"
            )


    @classmethod
    def stack ( cls, matrices: Sequence ) -> List[ "SpdMatrix" ] :
        """Validate many matrices with one batched eigen-solve"""

        arrays = [ _symmetrize( _as_square( m ) ) for m in matrices ]
        if not arrays :
            return []

        if len( { a.shape for a in arrays } ) != 1 :
            raise ValidationError( "all matrices of a stack must share one dimension" )

        vals, vecs = sym_eig_batch( np.stack( arrays ) )

        return [
            cls( a, eig_cache= ( vals[ k ], vecs[ k ] ) )
            for k, a in enumerate( arrays )
        ]


    @property
    def log_entries ( self ) -> np.ndarray :
        """Matrix logarithm as a read-only array, computed once"""

        if self.log_cache is None :
            vals, vecs = self.eig()
            log = ( vecs * np.log( vals ) ) @ vecs.T
            log = ( log + log.T ) / 2
            log.setflags( write= False )
            object.__setattr__( self, "log_cache", log )

        return self.log_cache


@dataclass( frozen= True )
class KernelParams :
    """Bandwidth and exponent convention of the Log-Euclidean kernel"""

    gamma_kernel: float = 1.0
    exponent: str = "squared_norm"

    def __post_init__ ( self ) :
        if not np.isfinite( self.gamma_kernel ) or self.gamma_kernel <= 0 :
            raise ValidationError( f"gamma_kernel must be > 0, got {self.gamma_kernel}" )
        if self.exponent not in KERNEL_EXPONENTS :
            raise ValidationError(
                f"kernel exponent must be one of {KERNEL_EXPONENTS}, got {self.exponent!r}"
            )


@lru_cache( maxsize= None )
def _round_robin ( n: int ) -> Tuple[ Tuple[ np.ndarray, np.ndarray ], ... ] :
    """
    Parallel Jacobi ordering: n - 1 rounds (n even) of disjoint (p, q) pairs
    covering every off-diagonal position once per sweep
    """

    m = n + ( n % 2 )
    players = list( range( m ) )
    rounds = []

    for _ in range( m - 1 ) :
        ps, qs = [], []
        for k in range( m // 2 ) :
            a, b = players[ k ], players[ m - 1 - k ]
            if a < n and b < n :
                ps.append( min( a, b ) )
                qs.append( max( a, b ) )

        if ps :
            rounds.append( ( np.array( ps, dtype= np.intp ), np.array( qs, dtype= np.intp ) ) )

        # circle method: first player fixed, the rest rotate by one
        players = [ players[ 0 ], players[ -1 ] ] + players[ 1:-1 ]

    return tuple( rounds )


def _converged ( a: np.ndarray, off_mask: np.ndarray ) -> bool :
    """Off-diagonal Frobenius mass below JACOBI_TOL of diagonal mass, for every matrix"""

    off = np.sqrt( np.sum( ( a * off_mask ) ** 2, axis= ( 1, 2 ) ) )
    diag = np.sqrt( np.sum( np.diagonal( a, axis1= 1, axis2= 2 ) ** 2, axis= 1 ) )

    return bool( np.all( off <= JACOBI_TOL * diag ) )


def sym_eig_batch ( stack: np.ndarray ) -> Eigenpairs :
    """
    Cyclic Jacobi eigendecomposition of a stack of symmetric matrices
    Args:
        stack: Array of shape (b, n, n), every slice symmetric
    Returns:
        Eigenpairs: eigenvalues (b, n) in descending order and
        eigenvectors (b, n, n) with eigenvectors as columns
    """

    a = np.array( stack, dtype= float )
    if a.ndim != 3 or a.shape[ 1 ] != a.shape[ 2 ] :
        raise ValidationError( f"expected a stack of square matrices, got shape {a.shape}" )

    b, n, _ = a.shape
    eye = np.eye( n )
    off_mask = 1.0 - eye
    v = np.broadcast_to( eye, a.shape ).copy()
    rounds = _round_robin( n )

    sweep = 0
    while not _converged( a, off_mask ) :
        if sweep >= JACOBI_MAX_SWEEPS :
            raise NumericalError(
                f"Jacobi eigen-solver did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )

        for p, q in rounds :
            app = a[ :, p, p ]
            aqq = a[ :, q, q ]
            apq = a[ :, p, q ]

            # rotation angle that annihilates a_pq (Golub & Van Loan sym.schur2)
            nonzero = apq != 0.0
            with np.errstate( over= "ignore" ) :
                tau = ( aqq - app ) / ( 2.0 * np.where( nonzero, apq, 1.0 ) )
                t = np.where( tau >= 0.0, 1.0, -1.0 ) / ( np.abs( tau ) + np.hypot( 1.0, tau ) )
            t = np.where( nonzero, t, 0.0 )
            c = 1.0 / np.sqrt( 1.0 + t * t )
            s = t * c

            j = np.broadcast_to( eye, a.shape ).copy()
            j[ :, p, p ] = c
            j[ :, q, q ] = c
            j[ :, p, q ] = s
            j[ :, q, p ] = -s

            a = np.matmul( np.swapaxes( j, 1, 2 ), np.matmul( a, j ) )
            a[ :, p, q ] = 0.0
            a[ :, q, p ] = 0.0
            v = np.matmul( v, j )

        a = ( a + np.swapaxes( a, 1, 2 ) ) / 2
        sweep += 1

    logger.debug( "Jacobi: %d matrices of size %d converged in %d sweeps", b, n, sweep )

    vals = np.diagonal( a, axis1= 1, axis2= 2 ).copy()
    order = np.argsort( -vals, axis= 1, kind= "stable" )
    vals = np.take_along_axis( vals, order, axis= 1 )
    vecs = np.take_along_axis( v, order[ :, np.newaxis, : ], axis= 2 )

    return vals, vecs


def sym_eig ( m: Union[ SymMatrix, np.ndarray ] ) -> Eigenpairs :
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix"""

    if not isinstance( m, SymMatrix ) :
        m = SymMatrix( m )

    return m.eig()


def spd_log ( s: SymMatrix ) -> SymMatrix :
    """Principal matrix logarithm U diag(ln λ) U^T of an SPD matrix"""

    if isinstance( s, SpdMatrix ) :
        return SymMatrix( s.log_entries )

    vals, vecs = s.eig()
    if not vals[ -1 ] > 0.0 :
        raise DomainError(
            f"matrix logarithm needs an SPD matrix, min eigenvalue is {vals[ -1 ]:.3e}"
        )

    return SymMatrix( ( vecs * np.log( vals ) ) @ vecs.T )


def sym_exp ( m: SymMatrix ) -> SpdMatrix :
    """Matrix exponential U diag(exp λ) U^T of a symmetric matrix"""

    vals, vecs = m.eig()
    return SpdMatrix( ( vecs * np.exp( vals ) ) @ vecs.T )


def _log_rows ( matrices: Sequence[ SpdMatrix ] ) -> np.ndarray :
    """Flattened matrix logs, one row per matrix"""

    if not matrices :
        raise ValidationError( "expected at least one SPD matrix" )

    dims = { m.dim for m in matrices }
    if len( dims ) != 1 :
        raise ValidationError( f"SPD matrices have mixed dimensions {sorted( dims )}" )

    return np.stack( [ m.log_entries.ravel() for m in matrices ] )


def _sq_dist_to_rows ( x: np.ndarray, rows: np.ndarray ) -> np.ndarray :
    """Squared Euclidean distance of x to every row"""

    diff = rows - x
    return np.sum( diff * diff, axis= 1 )


def lem_sq ( s1: SpdMatrix, s2: SpdMatrix ) -> float :
    """Squared Log-Euclidean distance ||log S1 - log S2||_F^2"""

    if s1.dim != s2.dim :
        raise ValidationError( f"dimension mismatch: {s1.dim} vs {s2.dim}" )

    return float( _sq_dist_to_rows(
        s1.log_entries.ravel(), s2.log_entries.reshape( 1, -1 )
    )[ 0 ] )


def lem_sq_matrix (
    rows: Sequence[ SpdMatrix ], cols: Optional[ Sequence[ SpdMatrix ] ] = None
) -> np.ndarray :
    """
    Pairwise squared Log-Euclidean distances
    Args:
        rows: First set of SPD matrices
        cols: Second set; None means rows against themselves (exactly symmetric, zero diagonal)
    """

    row_logs = _log_rows( rows )

    if cols is None :
        count = len( row_logs )
        dist = np.zeros( ( count, count ) )
        for i in range( count ) :
            d = _sq_dist_to_rows( row_logs[ i ], row_logs[ i + 1: ] )
            dist[ i, i + 1: ] = d
            dist[ i + 1:, i ] = d
        return dist

    col_logs = _log_rows( cols )
    if col_logs.shape[ 1 ] != row_logs.shape[ 1 ] :
        raise ValidationError( "row and column SPD matrices differ in dimension" )

    return np.stack( [ _sq_dist_to_rows( x, col_logs ) for x in row_logs ] )


def kernel_from_lem ( dist: Union[ float, np.ndarray ], p: KernelParams ) :
    """Map squared LEM distances to kernel values"""

    dist = np.asarray( dist, dtype= float )
    if p.exponent == "literal_fourth_power" :
        dist = dist * dist

    # clamp keeps the kernel strictly positive under underflow
    return np.maximum( np.exp( -dist / ( p.gamma_kernel ** 2 ) ), np.finfo( float ).tiny )


def kernel ( s1: SpdMatrix, s2: SpdMatrix, p: KernelParams ) -> float :
    """Gaussian Log-Euclidean graph kernel exp(-L(S1, S2) / gamma^2)"""

    return float( kernel_from_lem( lem_sq( s1, s2 ), p ) )


def gram ( matrices: Sequence[ SpdMatrix ], p: KernelParams ) -> np.ndarray :
    """Symmetric, unit-diagonal kernel Gram matrix of a list of SPD matrices"""

    return kernel_from_lem( lem_sq_matrix( matrices ), p )


def cross_gram (
    rows: Sequence[ SpdMatrix ], cols: Sequence[ SpdMatrix ], p: KernelParams
) -> np.ndarray :
    """Kernel values between two sets of SPD matrices"""

    return kernel_from_lem( lem_sq_matrix( rows, cols ), p )


def median_lem_sq ( matrices: Sequence[ SpdMatrix ] ) -> float :
    """Median of the off-diagonal pairwise squared LEM distances (0 for a single matrix)"""

    if len( matrices ) < 2 :
        return 0.0

    dist = lem_sq_matrix( matrices )
    upper = dist[ np.triu_indices( len( matrices ), k= 1 ) ]

    return float( np.median( upper ) )
