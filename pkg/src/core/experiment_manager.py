"""
LinkSched - Experiment Manager Module
Main class that coordinates dataset generation, oracle labelling, training,
evaluation and result files
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import hashlib
import logging
import time
import numpy as np

from ..utils.config import ExperimentSpec, spec_to_dict
from ..utils.seeding import FADING_STREAM, RANDOM_STREAM, SPLIT_STREAM, TIMING_STREAM, mix_seed
from .channel_sim import (
    ChannelRealization, Layout, ScheduleDecision, SimConfig,
    generate_layout, layout_from_record, layout_to_record, realize_channel, sum_rate
)
from .errors import StorageError, ValidationError
from .file_operations import FileOperations
from .graph_embedding import LinkEmbedding, embed_layout
from .kernel_svm import (
    CvReport, SvmModel, TrainSet, model_from_dict, model_to_dict,
    predict_layout, train_with_cv
)
from .schedulers import SCHEMES, exhaustive_optimal

logger = logging.getLogger( __name__ )

VERSION = "1.1.0"

SPLITS = { "train": 0, "test": 1 }
KERNEL_SCHEME = "kernel"
EVAL_SCHEMES = ( KERNEL_SCHEME, "exhaustive", "greedy", "strongest", "random", "all_active" )
POOLED_DIR = "pooled"

RESULTS_HEADER = (
    "field_length", "scheme", "mean_rate_bps", "ratio_pct",
    "activation_pct", "accuracy_pct", "time_s"
)
CV_HEADER = ( "C", "factor", "gamma_kernel", "accuracy_pct", "mean_rate_bps", "threshold", "chosen" )

T = TypeVar( "T" )
R = TypeVar( "R" )


@dataclass( frozen= True, eq= False )
class LabelledLayout :
    """One layout with its channel, oracle schedule and link embeddings"""

    layout: Layout
    channel: ChannelRealization
    decision: ScheduleDecision
    best_rate: float
    embeddings: List[ LinkEmbedding ]


@dataclass
class Dataset :
    """Labelled layouts of one split at one field length"""

    split: str
    field_length: float
    config: SimConfig
    items: List[ LabelledLayout ] = field( default_factory= list )

    def __len__ ( self ) -> int :
        return len( self.items )


    @property
    def sample_count ( self ) -> int :
        return sum( it.layout.K for it in self.items )


@dataclass( frozen= True )
class EvalRow :
    """One line of a results CSV"""

    field_length: float
    scheme: str
    mean_rate: float
    ratio_pct: float
    activation_pct: float
    accuracy_pct: float
    time_s: Optional[ float ] = None

    def as_csv ( self ) -> List[ str ] :
        return [
            f"{self.field_length:g}", self.scheme, f"{self.mean_rate:.6f}",
            f"{self.ratio_pct:.4f}", f"{self.activation_pct:.4f}", f"{self.accuracy_pct:.4f}",
            "" if self.time_s is None else f"{self.time_s:.6f}"
        ]


@dataclass
class EvalReport :
    """Paired evaluation of every scheme on the same test layouts"""

    field_length: float
    rows: List[ EvalRow ]
    per_layout: Dict[ str, np.ndarray ]
    seeds: Dict[ str, int ]
    config: Dict

    def row ( self, scheme: str ) -> EvalRow :
        for r in self.rows :
            if r.scheme == scheme :
                return r
        raise KeyError( scheme )


def embedding_checksum ( e: LinkEmbedding ) -> str :
    """sha256 of the S_Dq entries (float64, C order)"""

    return hashlib.sha256( np.ascontiguousarray( e.s_dq.entries ).tobytes() ).hexdigest()


def field_dir ( field_length: float ) -> str :
    return f"fl{field_length:g}"


def train_set_from ( datasets: Sequence[ Dataset ] ) -> TrainSet :
    """Pool the links of several datasets; every layout keeps its own group"""

    points = []
    labels = []
    groups = []
    group = 0

    for ds in datasets :
        for it in ds.items :
            points.extend( e.s_dq for e in it.embeddings )
            labels.extend( it.decision.as_list() )
            groups.extend( [ group ] * it.layout.K )
            group += 1

    return TrainSet( tuple( points ), np.array( labels ), np.array( groups ), group, datasets[ 0 ].config.K )


def summarize (
    field_length: float, decisions: Dict[ str, List[ ScheduleDecision ] ],
    rates: Dict[ str, np.ndarray ], oracle: List[ ScheduleDecision ],
    times: Optional[ Dict[ str, float ] ] = None
) -> List[ EvalRow ] :
    """
    Results rows from paired per-layout decisions and rates
    ratio_pct is 100 * mean rate / mean exhaustive rate
    """

    reference = float( np.mean( rates[ "exhaustive" ] ) )
    rows = []

    for scheme in EVAL_SCHEMES :
        if scheme not in rates :
            continue

        mean_rate = float( np.mean( rates[ scheme ] ) )
        activation = float( np.mean( [ d.activation for d in decisions[ scheme ] ] ) )
        accuracy = float( np.mean( [
            np.mean( d.d == o.d ) for d, o in zip( decisions[ scheme ], oracle )
        ] ) )

        rows.append( EvalRow(
            field_length, scheme, mean_rate,
            100 * mean_rate / reference if reference > 0 else 0.0,
            100 * activation, 100 * accuracy,
            None if times is None else times.get( scheme )
        ) )

    return rows


def load_results_csv ( path: str ) -> List[ EvalRow ] :
    """Read a results CSV written by the harness"""

    rows = FileOperations().read_csv_file( path )
    if rows and tuple( rows[ 0 ].keys() ) != RESULTS_HEADER :
        raise ValidationError( f"{path} is not a results file" )

    try :
        return [ EvalRow(
            float( r[ "field_length" ] ), r[ "scheme" ], float( r[ "mean_rate_bps" ] ),
            float( r[ "ratio_pct" ] ), float( r[ "activation_pct" ] ), float( r[ "accuracy_pct" ] ),
            float( r[ "time_s" ] ) if r[ "time_s" ] else None
        ) for r in rows ]
    except ( TypeError, ValueError ) as e :
        raise ValidationError( f"{path}: malformed results row ({e})" ) from e


def pivot_results (
    rows: Sequence[ EvalRow ]
) -> Tuple[ List[ str ], List[ float ], Dict[ Tuple[ str, float ], EvalRow ] ] :
    """
    Scheme x field-length view of results rows
    Returns:
        Tuple: schemes (harness order, unknown names last), sorted field lengths, cell map
    """

    cells = { ( r.scheme, r.field_length ): r for r in rows }
    names = { r.scheme for r in rows }
    schemes = [ s for s in EVAL_SCHEMES if s in names ] + sorted( names - set( EVAL_SCHEMES ) )
    lengths = sorted( { r.field_length for r in rows } )

    return schemes, lengths, cells


class ExperimentManager :
    """Main experiment manager that coordinates all operations"""

    def __init__ ( self, spec: ExperimentSpec, out_dir: str ) :
        self.spec = spec
        self.file_ops = FileOperations( out_dir )


    def _map ( self, fn: Callable[ [ T ], R ], items: Sequence[ T ] ) -> List[ R ] :
        """Order-preserving map, spread over worker threads when configured"""

        if self.spec.workers <= 1 or len( items ) <= 1 :
            return [ fn( x ) for x in items ]

        with ThreadPoolExecutor( max_workers= self.spec.workers ) as pool :
            return list( pool.map( fn, items ) )


    def split_seed ( self, split: str, field_length: float ) -> int :
        """Seed of one split at one field length, derived from the master seed"""

        if split not in SPLITS :
            raise ValidationError( f"unknown split {split!r}" )

        return mix_seed(
            self.spec.master_seed, SPLIT_STREAM, SPLITS[ split ], int( round( field_length * 1000 ) )
        )


    def sim_config ( self, split: str, field_length: float ) -> SimConfig :
        return self.spec.sim_for( field_length, self.split_seed( split, field_length ) )


    def _n_layouts ( self, split: str ) -> int :
        return self.spec.n_train_layouts if split == "train" else self.spec.n_test_layouts


    def _model_dir ( self, field_length: Optional[ float ] ) -> str :
        return POOLED_DIR if self.spec.pooled or field_length is None else field_dir( field_length )


    def write_manifest ( self ) -> None :
        """Config echo, derived seeds and version"""

        seeds = {
            field_dir( fl ): { s: self.split_seed( s, fl ) for s in SPLITS }
            for fl in self.spec.field_lengths
        }

        self.file_ops.write_json_file( self.file_ops.get_file_path( "manifest.json" ), {
            "version": VERSION,
            "config": spec_to_dict( self.spec ),
            "seeds": seeds,
            "schemes": list( EVAL_SCHEMES ),
        } )


    def generate ( self, split: str, field_length: float ) -> List[ Tuple[ Layout, int ] ] :
        """Draw the layouts of a split and write them with their fading seeds"""

        cfg = self.sim_config( split, field_length )
        layouts = self._map( lambda i : generate_layout( cfg, i ), list( range( self._n_layouts( split ) ) ) )
        pairs = [ ( lay, mix_seed( cfg.seed, FADING_STREAM, lay.index ) ) for lay in layouts ]

        path = self.file_ops.get_file_path( field_dir( field_length ), split, "layouts.jsonl" )
        self.file_ops.write_jsonl_file( path, [
            layout_to_record( lay, { "fading_seed": seed } ) for lay, seed in pairs
        ] )
        logger.info( "Generated %d %s layouts at %gm", len( pairs ), split, field_length )

        return pairs


    def load_layouts ( self, split: str, field_length: float ) -> List[ Tuple[ Layout, int ] ] :
        """Read the layouts of a split and their fading seeds"""

        cfg = self.sim_config( split, field_length )
        path = self.file_ops.get_file_path( field_dir( field_length ), split, "layouts.jsonl" )
        records = self.file_ops.read_jsonl_file( path )

        try :
            return [ ( layout_from_record( r, cfg ), int( r[ "fading_seed" ] ) ) for r in records ]
        except ( KeyError, ValidationError ) as e :
            raise StorageError( path, f"bad layout record ({e})" ) from e


    def _label_one ( self, pair: Tuple[ Layout, int ] ) -> LabelledLayout :
        layout, fading_seed = pair
        ch = realize_channel( layout, fading_seed )
        decision, best = exhaustive_optimal( ch, layout.config )

        return LabelledLayout( layout, ch, decision, best, embed_layout( layout, self.spec.embed ) )


    def label (
        self, split: str, field_length: float,
        layouts: Optional[ List[ Tuple[ Layout, int ] ] ] = None
    ) -> Dataset :
        """Label every link of a split with the exhaustive optimum and write the labels"""

        if layouts is None :
            layouts = self.load_layouts( split, field_length )

        items = self._map( self._label_one, layouts )
        path = self.file_ops.get_file_path( field_dir( field_length ), split, "labels.jsonl" )
        self.file_ops.write_jsonl_file( path, [ {
            "index": it.layout.index,
            "d": it.decision.as_list(),
            "best_rate": it.best_rate,
            "checksums": [ embedding_checksum( e ) for e in it.embeddings ],
        } for it in items ] )

        ds = Dataset( split, field_length, self.sim_config( split, field_length ), items )
        logger.info( "Labelled %d %s layouts (%d links) at %gm", len( ds ), split, ds.sample_count, field_length )

        return ds


    def build_dataset ( self, split: str, field_length: float ) -> Dataset :
        """Generate and label one split"""

        return self.label( split, field_length, self.generate( split, field_length ) )


    def load_dataset ( self, split: str, field_length: float ) -> Dataset :
        """Read a labelled split, rebuilding channels and embeddings and checking checksums"""

        layouts = self.load_layouts( split, field_length )
        path = self.file_ops.get_file_path( field_dir( field_length ), split, "labels.jsonl" )
        labels = self.file_ops.read_jsonl_file( path )

        if len( labels ) != len( layouts ) :
            raise StorageError( path, f"{len( labels )} label records for {len( layouts )} layouts" )

        def rebuild ( args: Tuple[ Tuple[ Layout, int ], Dict ] ) -> LabelledLayout :
            ( layout, fading_seed ), rec = args
            embeddings = embed_layout( layout, self.spec.embed )

            if rec.get( "index" ) != layout.index or rec.get( "checksums" ) != [ embedding_checksum( e ) for e in embeddings ] :
                raise StorageError( path, f"labels do not match layout {layout.index}" )

            try :
                decision = ScheduleDecision( rec[ "d" ] )
                best = float( rec[ "best_rate" ] )
            except ( KeyError, ValidationError ) as e :
                raise StorageError( path, f"bad label record ({e})" ) from e

            return LabelledLayout( layout, realize_channel( layout, fading_seed ), decision, best, embeddings )

        items = self._map( rebuild, list( zip( layouts, labels ) ) )

        return Dataset( split, field_length, self.sim_config( split, field_length ), items )


    def run_training (
        self, datasets: Sequence[ Dataset ]
    ) -> Tuple[ SvmModel, CvReport ] :
        """
        Train one model on the given training datasets and write it
        C and the activation threshold are always cross-validated by out-of-fold sum rate;
        the bandwidth too unless gamma_kernel is configured
        """

        if not datasets :
            raise ValidationError( "no training data" )

        ts = train_set_from( datasets )
        spec = self.spec
        field_length = None if len( datasets ) > 1 else datasets[ 0 ].field_length
        folder = self._model_dir( field_length )
        channels = [ ( it.channel, it.layout.config ) for ds in datasets for it in ds.items ]

        if spec.gamma_kernel is None :
            grid, base = spec.bandwidth_grid, None
        else :
            grid, base = ( 1.0, ), spec.gamma_kernel

        model, report = train_with_cv(
            ts, spec.hyper, grid, spec.cv_folds, spec.c_grid, channels, base
        )
        self.file_ops.write_csv_file(
            self.file_ops.get_file_path( folder, "cv_report.csv" ), CV_HEADER,
            [ [ f"{row.C:g}", f"{row.factor:g}", repr( row.gamma_kernel ), f"{100 * row.accuracy:.4f}",
                "" if row.mean_rate is None else f"{row.mean_rate:.6f}", repr( row.threshold ),
                int( i == report.chosen ) ]
              for i, row in enumerate( report.rows ) ]
        )

        self.save_model( folder, model )

        return model, report


    def save_model ( self, folder: str, model: SvmModel ) -> None :
        self.file_ops.write_json_file( self.file_ops.get_file_path( folder, "model.json" ), model_to_dict( model ) )


    def load_model ( self, field_length: Optional[ float ] = None ) -> SvmModel :
        """Model of a field length, or the pooled model"""

        path = self.file_ops.get_file_path( self._model_dir( field_length ), "model.json" )
        data = self.file_ops.read_json_file( path )

        try :
            return model_from_dict( data )
        except ValidationError as e :
            raise StorageError( path, str( e ) ) from e


    def _decide ( self, scheme: str, model: SvmModel, it: LabelledLayout ) -> ScheduleDecision :
        cfg = it.layout.config

        if scheme == KERNEL_SCHEME :
            return predict_layout( model, it.embeddings, it.channel, cfg )
        if scheme == "exhaustive" :
            return it.decision

        return SCHEMES[ scheme ]( it.channel, cfg, mix_seed( cfg.seed, RANDOM_STREAM, it.layout.index ) )


    def measure_timing ( self, model: SvmModel, field_length: float ) -> Dict[ str, float ] :
        """
        Median wall-clock time of every scheme on fresh layouts
        The kernel scheme is timed from positions (embedding + prediction)
        """

        seed = mix_seed( self.spec.master_seed, TIMING_STREAM, int( round( field_length * 1000 ) ) )
        cfg = self.spec.sim_for( field_length, seed )
        layouts = [ generate_layout( cfg, i ) for i in range( self.spec.timing_layouts ) ]
        channels = [ realize_channel( lay, mix_seed( cfg.seed, FADING_STREAM, lay.index ) ) for lay in layouts ]
        times = {}

        for scheme in EVAL_SCHEMES :
            runs = []
            for _ in range( self.spec.timing_repeats ) :
                start = time.perf_counter()
                for lay, ch in zip( layouts, channels ) :
                    if scheme == KERNEL_SCHEME :
                        predict_layout( model, embed_layout( lay, self.spec.embed ), ch, cfg )
                    else :
                        SCHEMES[ scheme ]( ch, cfg, mix_seed( cfg.seed, RANDOM_STREAM, lay.index ) )
                runs.append( time.perf_counter() - start )
            times[ scheme ] = float( np.median( runs ) )
            logger.debug( "Timing %s at %gm: %.6fs", scheme, field_length, times[ scheme ] )

        return times


    def run_eval ( self, model: SvmModel, dataset: Dataset, write: bool = True ) -> EvalReport :
        """Score the kernel scheme and every baseline on the same test layouts"""

        decisions: Dict[ str, List[ ScheduleDecision ] ] = {}
        rates: Dict[ str, np.ndarray ] = {}

        for scheme in EVAL_SCHEMES :
            picked = self._map( lambda it : self._decide( scheme, model, it ), dataset.items )
            decisions[ scheme ] = picked
            rates[ scheme ] = np.array( [
                it.best_rate if scheme == "exhaustive" else sum_rate( it.channel, d, it.layout.config )
                for d, it in zip( picked, dataset.items )
            ] )

        times = self.measure_timing( model, dataset.field_length ) if self.spec.measure_timing else None
        rows = summarize( dataset.field_length, decisions, rates, [ it.decision for it in dataset.items ], times )

        for r in rows :
            logger.info(
                "%gm %-10s ratio %.2f%% activation %.2f%% accuracy %.2f%%",
                r.field_length, r.scheme, r.ratio_pct, r.activation_pct, r.accuracy_pct
            )

        report = EvalReport(
            dataset.field_length, rows, rates,
            { s: self.split_seed( s, dataset.field_length ) for s in SPLITS },
            spec_to_dict( self.spec )
        )

        if write :
            self.write_results( self.file_ops.get_file_path( field_dir( dataset.field_length ), "results.csv" ), rows )

        return report


    def write_results ( self, path: str, rows: Sequence[ EvalRow ] ) -> None :
        self.file_ops.write_csv_file( path, RESULTS_HEADER, [ r.as_csv() for r in rows ] )


    def bench ( self ) -> List[ EvalReport ] :
        """Full pipeline over every field length; writes <out>/results.csv"""

        self.write_manifest()
        lengths = self.spec.field_lengths
        train_sets = { fl: self.build_dataset( "train", fl ) for fl in lengths }
        test_sets = { fl: self.build_dataset( "test", fl ) for fl in lengths }

        if self.spec.pooled :
            pooled, _ = self.run_training( [ train_sets[ fl ] for fl in lengths ] )
            models = { fl: pooled for fl in lengths }
        else :
            models = { fl: self.run_training( [ train_sets[ fl ] ] )[ 0 ] for fl in lengths }

        reports = [ self.run_eval( models[ fl ], test_sets[ fl ] ) for fl in lengths ]
        self.write_results(
            self.file_ops.get_file_path( "results.csv" ), [ r for rep in reports for r in rep.rows ]
        )

        return reports
