"""
LinkSched - Kernel SVM Module
Soft-margin SVM on SPD link embeddings with a precomputed Log-Euclidean Gram
matrix, trained by sequential minimal optimization
"""

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import logging
import math
import warnings
import numpy as np

from .channel_sim import ChannelRealization, ScheduleDecision, SimConfig, sum_rates
from .errors import ConvergenceWarning, ValidationError
from .graph_embedding import LinkEmbedding
from .schedulers import strongest_link
from .spd_geometry import (
    KernelParams, SpdMatrix, cross_gram, gram, kernel_from_lem, lem_sq_matrix
)

logger = logging.getLogger( __name__ )

MODEL_SCHEMA = "linksched.svm-model"
MODEL_SCHEMA_VERSION = 1
BANDWIDTH_GRID = ( 0.25, 0.5, 1.0, 2.0, 4.0, 8.0 )
C_GRID = ( 1.0, 10.0 )
CV_FOLDS = 5
THRESHOLD_STEPS = 49

# curvature floor for non-positive a_ij (LIBSVM's TAU)
TAU = 1e-12


@dataclass( frozen= True )
class SvmHyper :
    """SVM hyperparameters"""

    C: float = 10.0
    kernel: KernelParams = field( default_factory= KernelParams )
    tol: float = 1e-3
    max_passes: int = 100
    class_weighting: bool = True

    def __post_init__ ( self ) :
        if not self.C > 0 :
            raise ValidationError( f"C must be > 0, got {self.C}" )
        if not self.tol > 0 :
            raise ValidationError( f"tol must be > 0, got {self.tol}" )
        if int( self.max_passes ) != self.max_passes or self.max_passes < 1 :
            raise ValidationError( f"max_passes must be a positive integer, got {self.max_passes}" )


@dataclass( frozen= True, eq= False )
class TrainSet :
    """Labelled link embeddings; groups hold the layout index of every sample"""

    embeddings: Tuple[ SpdMatrix, ... ]
    labels: np.ndarray
    groups: np.ndarray
    layout_count: int
    pair_count: int

    def __post_init__ ( self ) :
        labels = np.asarray( self.labels ).astype( np.int8 )
        groups = np.asarray( self.groups, dtype= np.int64 )

        if not self.embeddings :
            raise ValidationError( "training set is empty" )
        if len( { e.dim for e in self.embeddings } ) != 1 :
            raise ValidationError( "training embeddings differ in dimension" )
        if labels.shape != ( len( self.embeddings ), ) or groups.shape != labels.shape :
            raise ValidationError( "labels and groups must match the number of embeddings" )
        if not np.all( ( labels == 0 ) | ( labels == 1 ) ) :
            raise ValidationError( "labels must be 0 or 1" )

        object.__setattr__( self, "embeddings", tuple( self.embeddings ) )
        object.__setattr__( self, "labels", labels )
        object.__setattr__( self, "groups", groups )


    @classmethod
    def from_samples (
        cls, samples: Sequence[ Tuple[ SpdMatrix, int ] ],
        groups: Optional[ Sequence[ int ] ] = None,
        pair_count: int = 1
    ) -> "TrainSet" :
        """Build from (embedding, label) pairs; without groups every sample is its own layout"""

        embeddings = tuple( s for s, _ in samples )
        labels = np.array( [ label for _, label in samples ] )
        groups = np.arange( len( samples ) ) if groups is None else np.asarray( groups )

        return cls( embeddings, labels, groups, len( np.unique( groups ) ), pair_count )


    def __len__ ( self ) -> int :
        return len( self.embeddings )


    @property
    def samples ( self ) -> List[ Tuple[ SpdMatrix, int ] ] :
        return [ ( e, int( t ) ) for e, t in zip( self.embeddings, self.labels ) ]


@dataclass( frozen= True, eq= False )
class SvmModel :
    """
    Trained classifier: support points, signed dual coefficients alpha_i y_i and bias
    threshold is the calibrated offset already subtracted from bias
    """

    support_points: Tuple[ SpdMatrix, ... ]
    dual_coeffs: np.ndarray
    bias: float
    hyper: SvmHyper
    converged: bool = True
    iterations: int = 0
    objective: float = 0.0
    constant_label: Optional[ int ] = None
    threshold: float = 0.0

    @property
    def n_support ( self ) -> int :
        return len( self.support_points )


@dataclass
class SmoTrace :
    """Dual objective after every SMO sweep"""

    objective: List[ float ] = field( default_factory= list )


@dataclass( frozen= True )
class CvRow :
    """One (C, bandwidth) candidate; mean_rate is None when scored by accuracy only"""

    C: float
    factor: float
    gamma_kernel: float
    accuracy: float
    mean_rate: Optional[ float ] = None
    threshold: float = 0.0


@dataclass
class CvReport :
    """Cross-validated score of every (C, bandwidth) candidate"""

    base_gamma: float
    rows: List[ CvRow ]
    chosen: int

    @property
    def best ( self ) -> CvRow :
        return self.rows[ self.chosen ]


    @property
    def gamma_kernel ( self ) -> float :
        return self.best.gamma_kernel


    @property
    def C ( self ) -> float :
        return self.best.C


    @property
    def threshold ( self ) -> float :
        return self.best.threshold


def _box ( y: np.ndarray, hp: SvmHyper ) -> np.ndarray :
    """Per-sample box constraint, class-balanced when enabled"""

    if not hp.class_weighting :
        return np.full( y.shape, hp.C )

    n = len( y )
    n_pos = int( np.sum( y > 0 ) )
    n_neg = n - n_pos

    return np.where( y > 0, hp.C * n / ( 2 * n_pos ), hp.C * n / ( 2 * n_neg ) )


def _dual_value ( alpha: np.ndarray, grad: np.ndarray ) -> float :
    """W(alpha) = sum(alpha) - 1/2 alpha^T Q alpha, using Q alpha = grad + 1"""

    return float( np.sum( alpha ) - 0.5 * np.dot( alpha, grad + 1.0 ) )


def _rho ( alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, c_box: np.ndarray ) -> float :
    """Threshold rho of f(x) = sum alpha_i y_i K(x_i, x) - rho"""

    yg = y * grad
    at_upper = alpha >= c_box
    at_lower = alpha <= 0
    free = ~( at_upper | at_lower )

    if np.any( free ) :
        return float( np.mean( yg[ free ] ) )

    ub_mask = ( at_upper & ( y < 0 ) ) | ( at_lower & ( y > 0 ) )
    lb_mask = ( at_upper & ( y > 0 ) ) | ( at_lower & ( y < 0 ) )
    ub = float( np.min( yg[ ub_mask ] ) ) if np.any( ub_mask ) else math.inf
    lb = float( np.max( yg[ lb_mask ] ) ) if np.any( lb_mask ) else -math.inf

    if math.isinf( ub ) :
        return lb
    if math.isinf( lb ) :
        return ub

    return ( ub + lb ) / 2


def _smo (
    k: np.ndarray, y: np.ndarray, hp: SvmHyper, trace: Optional[ SmoTrace ] = None
) -> Tuple[ np.ndarray, float, bool, int ] :
    """
    Solve min 1/2 a^T Q a - e^T a, 0 <= a_i <= C_i, y^T a = 0 with Q_ij = y_i y_j K_ij
    Working pair: maximal violating i, second-order choice of j
    Returns:
        Tuple: alpha, rho, converged flag, iteration count
    """

    n = len( y )
    c_box = _box( y, hp )
    alpha = np.zeros( n )
    grad = -np.ones( n )
    diag = np.diag( k ).copy()
    max_iter = hp.max_passes * n
    converged = False
    it = 0

    if trace is not None :
        trace.objective.append( 0.0 )

    while True :
        yg = -y * grad
        up = ( ( y > 0 ) & ( alpha < c_box ) ) | ( ( y < 0 ) & ( alpha > 0 ) )
        low = ( ( y > 0 ) & ( alpha > 0 ) ) | ( ( y < 0 ) & ( alpha < c_box ) )

        if not np.any( up ) or not np.any( low ) :
            converged = True
            break

        up_idx = np.flatnonzero( up )
        i = int( up_idx[ np.argmax( yg[ up_idx ] ) ] )
        m_up = yg[ i ]

        if m_up - np.min( yg[ low ] ) <= hp.tol :
            converged = True
            break
        if it >= max_iter :
            break

        cand = np.flatnonzero( low & ( yg < m_up ) )
        b = m_up - yg[ cand ]
        a = np.maximum( diag[ i ] + diag[ cand ] - 2 * k[ i, cand ], TAU )
        j = int( cand[ np.argmin( -( b * b ) / a ) ] )

        curvature = max( diag[ i ] + diag[ j ] - 2 * k[ i, j ], TAU )
        bound_i = c_box[ i ] - alpha[ i ] if y[ i ] > 0 else alpha[ i ]
        bound_j = alpha[ j ] if y[ j ] > 0 else c_box[ j ] - alpha[ j ]
        lam = min( ( m_up - yg[ j ] ) / curvature, bound_i, bound_j )

        alpha[ i ] += y[ i ] * lam
        alpha[ j ] -= y[ j ] * lam

        # land exactly on the box when a bound was hit
        if lam == bound_i :
            alpha[ i ] = c_box[ i ] if y[ i ] > 0 else 0.0
        if lam == bound_j :
            alpha[ j ] = 0.0 if y[ j ] > 0 else c_box[ j ]

        grad += lam * y * ( k[ :, i ] - k[ :, j ] )
        it += 1

        if trace is not None and it % n == 0 :
            trace.objective.append( _dual_value( alpha, grad ) )

    if trace is not None :
        trace.objective.append( _dual_value( alpha, grad ) )

    return alpha, _rho( alpha, grad, y, c_box ), converged, it


def _constant_model ( label: int, hp: SvmHyper ) -> SvmModel :
    return SvmModel(
        support_points= (), dual_coeffs= np.zeros( 0 ),
        bias= 1.0 if label == 1 else -1.0, hyper= hp, constant_label= label
    )


def _fit_gram (
    k: np.ndarray, labels: np.ndarray, hp: SvmHyper, trace: Optional[ SmoTrace ] = None
) -> Tuple[ np.ndarray, float, bool, int, float ] :
    """Signed coefficients alpha_i y_i for every sample, bias, and solver status"""

    y = np.where( labels == 1, 1.0, -1.0 )
    alpha, rho, converged, it = _smo( k, y, hp, trace )
    coeffs = alpha * y

    objective = float( np.sum( alpha ) - 0.5 * coeffs @ k @ coeffs )

    return coeffs, -rho, converged, it, objective


def train_with_trace (
    ts: TrainSet, hp: SvmHyper, k: Optional[ np.ndarray ] = None
) -> Tuple[ SvmModel, SmoTrace ] :
    """
    Train on a training set, recording the dual objective per sweep
    Args:
        ts: Training set
        hp: Hyperparameters (the kernel bandwidth is taken from hp.kernel)
        k: Precomputed Gram matrix of ts.embeddings under hp.kernel (optional)
    """

    trace = SmoTrace()
    classes = np.unique( ts.labels )

    if classes.size == 1 :
        logger.info( "Single-class training set: constant classifier for label %d", classes[ 0 ] )
        return _constant_model( int( classes[ 0 ] ), hp ), trace

    if k is None :
        k = gram( ts.embeddings, hp.kernel )

    coeffs, bias, converged, it, objective = _fit_gram( k, ts.labels, hp, trace )
    support = np.flatnonzero( coeffs != 0 )

    if not converged :
        warnings.warn(
            f"SMO stopped at its iteration cap ({it} steps) before reaching tol={hp.tol}",
            ConvergenceWarning, stacklevel= 2
        )
        logger.warning( "SMO did not converge in %d iterations", it )

    logger.info(
        "Trained SVM: %d samples, %d support vectors, %d iterations, converged=%s",
        len( ts ), support.size, it, converged
    )

    model = SvmModel(
        support_points= tuple( ts.embeddings[ s ] for s in support ),
        dual_coeffs= coeffs[ support ].copy(), bias= bias, hyper= hp,
        converged= converged, iterations= it, objective= objective
    )

    return model, trace


def train ( ts: TrainSet, hp: SvmHyper, k: Optional[ np.ndarray ] = None ) -> SvmModel :
    """Train a soft-margin kernel SVM by SMO"""

    return train_with_trace( ts, hp, k )[ 0 ]


def _fold_ids ( groups: np.ndarray, folds: int ) -> np.ndarray :
    """Fold of every sample, assigned by layout so a layout never straddles folds"""

    return np.searchsorted( np.unique( groups ), groups ) % folds


def _bandwidth_base ( median: float, exponent: str ) -> float :
    """Bandwidth at which the median squared LEM distance maps to exp(-1)"""

    if not median > 0 :
        return 1.0
    if exponent == "literal_fourth_power" :
        return median

    return math.sqrt( median )


def _out_of_fold (
    k: np.ndarray, ts: TrainSet, fold_of: np.ndarray, folds: int, hp: SvmHyper
) -> Tuple[ np.ndarray, np.ndarray ] :
    """Decision value of every sample from a model fitted without its fold, and which were scored"""

    values = np.zeros( len( ts ) )
    scored = np.zeros( len( ts ), dtype= bool )

    for f in range( folds ) :
        test = np.flatnonzero( fold_of == f )
        fit = np.flatnonzero( fold_of != f )
        if test.size == 0 or fit.size == 0 :
            continue

        labels = ts.labels[ fit ]
        if np.unique( labels ).size == 1 :
            values[ test ] = 1.0 if labels[ 0 ] == 1 else -1.0
        else :
            coeffs, bias, _, _, _ = _fit_gram( k[ np.ix_( fit, fit ) ], labels, hp )
            values[ test ] = k[ np.ix_( test, fit ) ] @ coeffs + bias

        scored[ test ] = True

    return values, scored


def calibrate_threshold (
    values: np.ndarray, groups: np.ndarray,
    channels: Sequence[ Tuple[ ChannelRealization, SimConfig ] ],
    steps: int = THRESHOLD_STEPS
) -> Tuple[ float, float ] :
    """
    Activation threshold on decision values that maximizes the mean sum rate
    Args:
        values: Decision value of every sample
        groups: Layout index of every sample, samples of a layout in link order
        channels: (channel, config) of every layout, in ascending group order
        steps: Number of quantiles of values tried besides 0 and "nothing active"
    Returns:
        (threshold, mean sum rate); ties go to the threshold closest to 0
    """

    values = np.asarray( values, dtype= float )
    groups = np.asarray( groups )
    layouts = np.unique( groups )

    if values.shape != groups.shape or values.size == 0 :
        raise ValidationError( "values and groups must be non-empty and of equal length" )
    if len( channels ) != layouts.size :
        raise ValidationError( f"expected {layouts.size} channels, got {len( channels )}" )

    candidates = np.unique( np.concatenate( (
        [ 0.0, np.nextafter( values.max(), np.inf ) ],
        np.quantile( values, np.linspace( 0.0, 1.0, max( int( steps ), 2 ) ) )
    ) ) )
    total = np.zeros( candidates.size )

    for r, g in enumerate( layouts ) :
        ch, cfg = channels[ r ]
        v = values[ groups == g ]
        if v.size != ch.K :
            raise ValidationError( f"layout {g} has {v.size} samples for {ch.K} links" )

        d = ( v[ np.newaxis, : ] >= candidates[ :, np.newaxis ] ).astype( np.int8 )
        empty = ~d.any( axis= 1 )
        if empty.any() :
            d[ empty ] = strongest_link( ch, cfg ).d

        total += sum_rates( ch, d, cfg )

    mean = total / layouts.size
    best = max( range( candidates.size ), key= lambda i : ( mean[ i ], -abs( candidates[ i ] ) ) )

    return float( candidates[ best ] ), float( mean[ best ] )


def select_bandwidth (
    ts: TrainSet, hp: SvmHyper,
    grid: Sequence[ float ] = BANDWIDTH_GRID, folds: int = CV_FOLDS,
    c_grid: Optional[ Sequence[ float ] ] = None,
    channels: Optional[ Sequence[ Tuple[ ChannelRealization, SimConfig ] ] ] = None,
    base: Optional[ float ] = None
) -> CvReport :
    """
    Cross-validate (C, gamma_kernel) over c_grid x (grid x base)
    Args:
        ts: Training set, folds are grouped by layout
        hp: Base hyperparameters; c_grid defaults to (hp.C,)
        grid: Bandwidth factors
        folds: Number of folds
        c_grid: Box constraints to try
        channels: (channel, config) per layout; when given, candidates are scored by the
            mean out-of-fold sum rate at a calibrated threshold instead of per-link accuracy
        base: Bandwidth scale, defaults to the median pairwise LEM scale
    Ties go to the earlier candidate (bandwidth-major order)
    """

    if not grid :
        raise ValidationError( "bandwidth grid is empty" )
    if folds < 2 :
        raise ValidationError( f"need at least 2 folds, got {folds}" )

    cs = tuple( float( c ) for c in c_grid ) if c_grid else ( hp.C, )
    if any( not c > 0 for c in cs ) :
        raise ValidationError( f"C grid entries must be > 0, got {cs}" )
    if base is not None and not base > 0 :
        raise ValidationError( f"bandwidth base must be > 0, got {base}" )

    dist = lem_sq_matrix( ts.embeddings )
    if base is None :
        upper = dist[ np.triu_indices( len( ts ), k= 1 ) ]
        median = float( np.median( upper ) ) if upper.size else 0.0
        base = _bandwidth_base( median, hp.kernel.exponent )

    fold_of = _fold_ids( ts.groups, folds )
    rows: List[ CvRow ] = []

    for factor in grid :
        params = KernelParams( factor * base, hp.kernel.exponent )
        k = kernel_from_lem( dist, params )

        for c in cs :
            values, scored = _out_of_fold( k, ts, fold_of, folds, replace( hp, C= c, kernel= params ) )
            pred = ( values >= 0 ).astype( np.int8 )
            accuracy = float( np.mean( pred[ scored ] == ts.labels[ scored ] ) ) if scored.any() else 0.0

            if channels is not None and scored.all() :
                threshold, rate = calibrate_threshold( values, ts.groups, channels )
                row = CvRow( c, float( factor ), params.gamma_kernel, accuracy, rate, threshold )
                logger.info(
                    "CV C=%g bandwidth x%g (gamma=%.6g): accuracy %.2f%%, mean rate %.6g at threshold %.4g",
                    c, factor, params.gamma_kernel, 100 * accuracy, rate, threshold
                )
            else :
                row = CvRow( c, float( factor ), params.gamma_kernel, accuracy )
                logger.info(
                    "CV C=%g bandwidth x%g (gamma=%.6g): accuracy %.2f%%",
                    c, factor, params.gamma_kernel, 100 * accuracy
                )

            rows.append( row )

    def score ( r: int ) -> Tuple[ float, int ] :
        row = rows[ r ]
        return ( row.accuracy if row.mean_rate is None else row.mean_rate, -r )

    return CvReport( float( base ), rows, max( range( len( rows ) ), key= score ) )


def train_with_cv (
    ts: TrainSet, hp: SvmHyper,
    grid: Sequence[ float ] = BANDWIDTH_GRID, folds: int = CV_FOLDS,
    c_grid: Optional[ Sequence[ float ] ] = None,
    channels: Optional[ Sequence[ Tuple[ ChannelRealization, SimConfig ] ] ] = None,
    base: Optional[ float ] = None
) -> Tuple[ SvmModel, CvReport ] :
    """Select C, bandwidth and threshold by cross-validation, then train on the full set"""

    report = select_bandwidth( ts, hp, grid, folds, c_grid, channels, base )
    chosen = replace( hp, C= report.C, kernel= KernelParams( report.gamma_kernel, hp.kernel.exponent ) )
    logger.info(
        "Selected C = %g, gamma_kernel = %.6g, threshold = %.6g",
        chosen.C, chosen.kernel.gamma_kernel, report.threshold
    )

    model = train( ts, chosen )
    if report.threshold != 0.0 and model.constant_label is None :
        model = replace( model, bias= model.bias - report.threshold, threshold= report.threshold )

    return model, report


def decision_values ( m: SvmModel, points: Sequence[ SpdMatrix ] ) -> np.ndarray :
    """Decision function sum_i c_i K(x_i, S) + b for many inputs"""

    if m.n_support == 0 :
        return np.full( len( points ), m.bias )

    return cross_gram( points, m.support_points, m.hyper.kernel ) @ m.dual_coeffs + m.bias


def decision_value ( m: SvmModel, s: SpdMatrix ) -> float :
    """Signed position of s relative to the separating hyperplane"""

    return float( decision_values( m, [ s ] )[ 0 ] )


def predict ( m: SvmModel, s: SpdMatrix ) -> int :
    """1 (activate) iff the decision value is >= 0"""

    return int( decision_value( m, s ) >= 0 )


def predict_layout (
    m: SvmModel, embeddings: Sequence[ LinkEmbedding ],
    ch: ChannelRealization, cfg: SimConfig
) -> ScheduleDecision :
    """Per-link predictions; an all-inactive outcome falls back to the strongest link"""

    values = decision_values( m, [ e.s_dq for e in embeddings ] )
    d = ( values >= 0 ).astype( np.int8 )

    if not d.any() :
        return strongest_link( ch, cfg )

    return ScheduleDecision( d )


def model_to_dict ( m: SvmModel ) -> Dict :
    """Self-describing model record (floats kept at full precision)"""

    hp = m.hyper

    return {
        "schema": MODEL_SCHEMA,
        "schema_version": MODEL_SCHEMA_VERSION,
        "hyper": {
            "C": hp.C,
            "tol": hp.tol,
            "max_passes": hp.max_passes,
            "class_weighting": hp.class_weighting,
            "gamma_kernel": hp.kernel.gamma_kernel,
            "kernel_exponent": hp.kernel.exponent,
        },
        "bias": float( m.bias ),
        "dual_coeffs": [ float( c ) for c in m.dual_coeffs ],
        "support_points": [ s.entries.tolist() for s in m.support_points ],
        "meta": {
            "converged": m.converged,
            "iterations": m.iterations,
            "objective": m.objective,
            "constant_label": m.constant_label,
            "threshold": float( m.threshold ),
        },
    }


def model_from_dict ( data: Dict ) -> SvmModel :
    """Rebuild a model from its record"""

    if data.get( "schema" ) != MODEL_SCHEMA :
        raise ValidationError( f"not a model file (schema {data.get( 'schema' )!r})" )
    if data.get( "schema_version" ) != MODEL_SCHEMA_VERSION :
        raise ValidationError( f"unsupported model schema version {data.get( 'schema_version' )!r}" )

    try :
        h = data[ "hyper" ]
        hp = SvmHyper(
            C= h[ "C" ], tol= h[ "tol" ], max_passes= h[ "max_passes" ],
            class_weighting= h[ "class_weighting" ],
            kernel= KernelParams( h[ "gamma_kernel" ], h[ "kernel_exponent" ] )
        )
        meta = data.get( "meta", {} )
        coeffs = np.array( data[ "dual_coeffs" ], dtype= float )
        points = SpdMatrix.stack( data[ "support_points" ] )
        bias = float( data[ "bias" ] )
    except ( KeyError, TypeError ) as e :
        raise ValidationError( f"malformed model record: {e}" ) from e

    if len( points ) != coeffs.size :
        raise ValidationError( "support point and coefficient counts differ" )

    return SvmModel(
        support_points= tuple( points ), dual_coeffs= coeffs, bias= bias, hyper= hp,
        converged= bool( meta.get( "converged", True ) ),
        iterations= int( meta.get( "iterations", 0 ) ),
        objective= float( meta.get( "objective", 0.0 ) ),
        constant_label= meta.get( "constant_label" ),
        threshold= float( meta.get( "threshold", 0.0 ) )
    )
