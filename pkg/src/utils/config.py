"""
LinkSched - Config Module
Experiment settings: JSON schema, defaults, validation and CLI overrides
"""

from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional, Sequence, Tuple

import logging
import os

from ..core.channel_sim import SimConfig
from ..core.errors import ValidationError
from ..core.file_operations import FileOperations
from ..core.graph_embedding import EmbeddingConfig
from ..core.kernel_svm import BANDWIDTH_GRID, C_GRID, CV_FOLDS, SvmHyper
from ..core.spd_geometry import KernelParams

logger = logging.getLogger( __name__ )

SCHEMA_VERSION = 1
DEFAULT_CONFIG = "default"
BUNDLED_CONFIG = os.path.join( os.path.dirname( os.path.dirname( os.path.dirname(
    os.path.abspath( __file__ ) ) ) ), "config", "default.json" )

SIM_KEYS = (
    "K", "d_min", "d_max", "carrier_freq", "bandwidth", "tx_power_dbm", "antenna_height",
    "antenna_gain_db", "noise_psd_dbm_hz", "pathloss_model", "alpha"
)
EMBED_KEYS = ( "gamma_reg", "weight_normalization" )
SVM_KEYS = (
    "C", "tol", "max_passes", "class_weighting", "gamma_kernel",
    "bandwidth_grid", "c_grid", "cv_folds", "kernel_exponent"
)
TOP_KEYS = (
    "schema_version", "master_seed", "n_train_layouts", "n_test_layouts", "field_lengths",
    "pooled", "measure_timing", "timing_layouts", "timing_repeats", "workers",
    "sim", "embed", "svm"
)


@dataclass( frozen= True )
class ExperimentSpec :
    """Everything a run depends on; the results are a pure function of it"""

    sim: SimConfig = field( default_factory= SimConfig )
    embed: EmbeddingConfig = field( default_factory= EmbeddingConfig )
    hyper: SvmHyper = field( default_factory= SvmHyper )
    gamma_kernel: Optional[ float ] = None
    bandwidth_grid: Tuple[ float, ... ] = BANDWIDTH_GRID
    c_grid: Tuple[ float, ... ] = C_GRID
    cv_folds: int = CV_FOLDS
    n_train_layouts: int = 90
    n_test_layouts: int = 100
    field_lengths: Tuple[ float, ... ] = ( 350.0, 400.0, 450.0, 500.0 )
    master_seed: int = 0
    pooled: bool = False
    measure_timing: bool = False
    timing_layouts: int = 10
    timing_repeats: int = 5
    workers: int = 1

    def __post_init__ ( self ) :
        object.__setattr__( self, "field_lengths", tuple( float( f ) for f in self.field_lengths ) )
        object.__setattr__( self, "bandwidth_grid", tuple( float( g ) for g in self.bandwidth_grid ) )
        object.__setattr__( self, "c_grid", tuple( float( c ) for c in self.c_grid ) )

        for name in ( "n_train_layouts", "n_test_layouts", "timing_layouts", "timing_repeats", "workers" ) :
            value = getattr( self, name )
            if isinstance( value, bool ) or not isinstance( value, int ) or value < 1 :
                raise ValidationError( f"{name} must be an integer >= 1, got {value!r}" )

        if not self.field_lengths :
            raise ValidationError( "field_lengths must not be empty" )
        if len( set( self.field_lengths ) ) != len( self.field_lengths ) :
            raise ValidationError( "field_lengths must be distinct" )
        if any( f <= self.sim.d_max for f in self.field_lengths ) :
            raise ValidationError( f"every field length must exceed d_max={self.sim.d_max}" )
        if self.gamma_kernel is not None and not self.gamma_kernel > 0 :
            raise ValidationError( f"gamma_kernel must be > 0 or null, got {self.gamma_kernel}" )
        if not self.bandwidth_grid or any( g <= 0 for g in self.bandwidth_grid ) :
            raise ValidationError( "bandwidth_grid must hold positive factors" )
        if not self.c_grid or any( not c > 0 for c in self.c_grid ) :
            raise ValidationError( "c_grid must hold positive box constraints" )
        if isinstance( self.cv_folds, bool ) or not isinstance( self.cv_folds, int ) or self.cv_folds < 2 :
            raise ValidationError( f"cv_folds must be an integer >= 2, got {self.cv_folds!r}" )
        if isinstance( self.master_seed, bool ) or not isinstance( self.master_seed, int ) or self.master_seed < 0 :
            raise ValidationError( f"master_seed must be a non-negative integer, got {self.master_seed!r}" )


    def sim_for ( self, field_length: float, seed: int ) -> SimConfig :
        """Simulation config of one field length and split"""

        return replace( self.sim, field_length= field_length, seed= seed )


def _check_keys ( section: str, data: Dict, allowed: Sequence[ str ] ) -> None :
    if not isinstance( data, dict ) :
        raise ValidationError( f"config section '{section}' must be an object" )

    unknown = sorted( set( data ) - set( allowed ) )
    if unknown :
        raise ValidationError( f"unknown config key(s) in '{section}': {', '.join( unknown )}" )


def spec_from_dict ( data: Dict[ str, Any ] ) -> ExperimentSpec :
    """
    Build an ExperimentSpec from a parsed config file
    Missing keys take their defaults; unknown keys are rejected
    """

    _check_keys( "<root>", data, TOP_KEYS )

    version = data.get( "schema_version", SCHEMA_VERSION )
    if version != SCHEMA_VERSION :
        raise ValidationError( f"unsupported config schema_version {version!r}" )

    sim = data.get( "sim", {} )
    embed = data.get( "embed", {} )
    svm = dict( data.get( "svm", {} ) )
    _check_keys( "sim", sim, SIM_KEYS )
    _check_keys( "embed", embed, EMBED_KEYS )
    _check_keys( "svm", svm, SVM_KEYS )

    try :
        kernel = KernelParams(
            svm.get( "gamma_kernel" ) or 1.0,
            svm.get( "kernel_exponent", KernelParams.exponent )
        )
        hyper = SvmHyper(
            C= svm.get( "C", SvmHyper.C ), kernel= kernel,
            tol= svm.get( "tol", SvmHyper.tol ),
            max_passes= svm.get( "max_passes", SvmHyper.max_passes ),
            class_weighting= bool( svm.get( "class_weighting", SvmHyper.class_weighting ) )
        )
        top = { k: data[ k ] for k in TOP_KEYS[ 1:10 ] if k in data }
        if "field_lengths" in top :
            top[ "field_lengths" ] = tuple( top[ "field_lengths" ] )

        return ExperimentSpec(
            sim= SimConfig( **sim ), embed= EmbeddingConfig( **embed ), hyper= hyper,
            gamma_kernel= svm.get( "gamma_kernel" ),
            bandwidth_grid= tuple( svm.get( "bandwidth_grid", BANDWIDTH_GRID ) ),
            c_grid= tuple( svm.get( "c_grid", C_GRID ) ),
            cv_folds= svm.get( "cv_folds", CV_FOLDS ),
            **top
        )
    except ValidationError :
        raise
    except ( TypeError, ValueError ) as e :
        raise ValidationError( f"bad config value: {e}" ) from e


def spec_to_dict ( spec: ExperimentSpec ) -> Dict[ str, Any ] :
    """Config file form of a spec (the inverse of spec_from_dict)"""

    sim = asdict( spec.sim )
    sim.pop( "field_length" )
    sim.pop( "seed" )

    return {
        "schema_version": SCHEMA_VERSION,
        "master_seed": spec.master_seed,
        "n_train_layouts": spec.n_train_layouts,
        "n_test_layouts": spec.n_test_layouts,
        "field_lengths": list( spec.field_lengths ),
        "pooled": spec.pooled,
        "measure_timing": spec.measure_timing,
        "timing_layouts": spec.timing_layouts,
        "timing_repeats": spec.timing_repeats,
        "workers": spec.workers,
        "sim": sim,
        "embed": asdict( spec.embed ),
        "svm": {
            "C": spec.hyper.C,
            "tol": spec.hyper.tol,
            "max_passes": spec.hyper.max_passes,
            "class_weighting": spec.hyper.class_weighting,
            "gamma_kernel": spec.gamma_kernel,
            "bandwidth_grid": list( spec.bandwidth_grid ),
            "c_grid": list( spec.c_grid ),
            "cv_folds": spec.cv_folds,
            "kernel_exponent": spec.hyper.kernel.exponent,
        },
    }


def load_spec ( path: Optional[ str ] = None ) -> ExperimentSpec :
    """
    Load an experiment spec
    Args:
        path: Config file path; None or "default" selects the built-in defaults
    """

    if path is None or path == DEFAULT_CONFIG :
        return ExperimentSpec()

    data = FileOperations().read_json_file( path )
    logger.info( "Loaded config %s", path )

    return spec_from_dict( data )


def apply_overrides (
    spec: ExperimentSpec,
    seed: Optional[ int ] = None,
    field_lengths: Optional[ Sequence[ float ] ] = None,
    k: Optional[ int ] = None,
    pooled: Optional[ bool ] = None,
    timing: Optional[ bool ] = None,
    workers: Optional[ int ] = None
) -> ExperimentSpec :
    """Apply command-line overrides; None leaves a value unchanged"""

    changes: Dict[ str, Any ] = {}

    if seed is not None :
        changes[ "master_seed" ] = seed
    if field_lengths :
        changes[ "field_lengths" ] = tuple( field_lengths )
    if k is not None :
        changes[ "sim" ] = replace( spec.sim, K= k )
    if pooled :
        changes[ "pooled" ] = True
    if timing :
        changes[ "measure_timing" ] = True
    if workers is not None :
        changes[ "workers" ] = workers

    return replace( spec, **changes ) if changes else spec
