"""
LinkSched - Command Line
Subcommands generate, label, train, eval, bench and view
"""

from typing import Optional, Sequence

import argparse
import logging
import sys

from .core.errors import LinkSchedError, StorageError
from .core.experiment_manager import VERSION, ExperimentManager, field_dir, load_results_csv
from .core.schedulers import MAX_EXHAUSTIVE_K
from .utils.config import DEFAULT_CONFIG, ExperimentSpec, apply_overrides, load_spec

logger = logging.getLogger( __name__ )

PROG = "linksched"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_STORAGE = 2


class ArgumentParser ( argparse.ArgumentParser ) :
    """argparse parser that exits with 1 on usage errors"""

    def error ( self, message: str ) :
        self.print_usage( sys.stderr )
        self.exit( EXIT_INVALID, f"{self.prog}: error: {message}\n" )


def _common () -> argparse.ArgumentParser :
    """Flags shared by every pipeline subcommand"""

    common = ArgumentParser( add_help= False )
    common.add_argument( "--config", default= DEFAULT_CONFIG, help= "JSON config file, or 'default'" )
    common.add_argument( "--seed", type= int, help= "master seed (overrides the config)" )
    common.add_argument( "--out", default= "out", help= "output directory (default: out)" )
    common.add_argument(
        "--field-length", type= float, action= "append", dest= "field_lengths", metavar= "M",
        help= "field length in meters, repeatable (overrides the config)"
    )
    common.add_argument( "--k", type= int, help= f"pairs per layout, at most {MAX_EXHAUSTIVE_K}" )
    common.add_argument( "--pooled", action= "store_true", help= "train one model across all field lengths" )
    common.add_argument( "--timing", action= "store_true", help= "fill the time_s column" )
    common.add_argument( "--workers", type= int, help= "worker threads for per-layout work" )
    common.add_argument( "-v", "--verbose", action= "count", default= 0, help= "-v info, -vv debug" )

    return common


def build_parser () -> ArgumentParser :
    """Create the command line parser"""

    parser = ArgumentParser(
        prog= PROG,
        description= "Link scheduling for D2D networks with a graph-embedding kernel SVM"
    )
    parser.add_argument( "--version", action= "version", version= f"%(prog)s {VERSION}" )
    sub = parser.add_subparsers( dest= "command", required= True, metavar= "command" )
    common = _common()

    sub.add_parser( "generate", parents= [ common ], help= "draw train and test layouts" )
    sub.add_parser( "label", parents= [ common ], help= "label generated layouts with the exact optimum" )
    sub.add_parser( "train", parents= [ common ], help= "train the kernel SVM on labelled layouts" )
    sub.add_parser( "eval", parents= [ common ], help= "evaluate every scheme on the test layouts" )
    sub.add_parser( "bench", parents= [ common ], help= "run the full pipeline for every field length" )

    view = sub.add_parser( "view", help= "show a results CSV in a table window" )
    view.add_argument( "results", help= "results.csv written by eval or bench" )
    view.add_argument( "-v", "--verbose", action= "count", default= 0 )

    return parser


def setup_logging ( verbosity: int ) -> None :
    """Root handler on stderr: WARNING, -v INFO, -vv DEBUG"""

    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig( level= level, format= LOG_FORMAT, stream= sys.stderr, force= True )
    logging.captureWarnings( True )


def _spec ( args: argparse.Namespace ) -> ExperimentSpec :
    return apply_overrides(
        load_spec( args.config ), seed= args.seed, field_lengths= args.field_lengths,
        k= args.k, pooled= args.pooled, timing= args.timing, workers= args.workers
    )


def cmd_generate ( manager: ExperimentManager ) -> None :
    manager.write_manifest()
    for fl in manager.spec.field_lengths :
        for split in ( "train", "test" ) :
            manager.generate( split, fl )


def cmd_label ( manager: ExperimentManager ) -> None :
    for fl in manager.spec.field_lengths :
        for split in ( "train", "test" ) :
            manager.label( split, fl )


def cmd_train ( manager: ExperimentManager ) -> None :
    lengths = manager.spec.field_lengths

    if manager.spec.pooled :
        manager.run_training( [ manager.load_dataset( "train", fl ) for fl in lengths ] )
    else :
        for fl in lengths :
            manager.run_training( [ manager.load_dataset( "train", fl ) ] )


def cmd_eval ( manager: ExperimentManager ) -> None :
    rows = []
    for fl in manager.spec.field_lengths :
        report = manager.run_eval( manager.load_model( fl ), manager.load_dataset( "test", fl ) )
        rows.extend( report.rows )

    manager.write_results( manager.file_ops.get_file_path( "results.csv" ), rows )


def cmd_view ( path: str ) -> int :
    """Open the results table window"""

    rows = load_results_csv( path )

    from PyQt6.QtWidgets import QApplication
    from .dialogs import ReportDialog

    app = QApplication.instance() or QApplication( [ PROG ] )
    app.setStyle( "Fusion" )
    app.setApplicationName( "LinkSched" )
    app.setApplicationVersion( VERSION )

    dialog = ReportDialog( results_path= path, rows= rows )
    dialog.exec()

    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "label": cmd_label,
    "train": cmd_train,
    "eval": cmd_eval,
    "bench": lambda manager : manager.bench(),
}


def main ( argv: Optional[ Sequence[ str ] ] = None ) -> int :
    """
    Run one subcommand
    Returns:
        int: 0 on success, 1 on invalid input, 2 on file errors
    """

    args = build_parser().parse_args( argv )
    setup_logging( args.verbose )

    try :
        if args.command == "view" :
            return cmd_view( args.results )

        spec = _spec( args )
        manager = ExperimentManager( spec, args.out )
        logger.info( "%s: field lengths %s, output %s", args.command,
                     ", ".join( field_dir( fl ) for fl in spec.field_lengths ), args.out )
        COMMANDS[ args.command ]( manager )
    except StorageError as e :
        print( f"{PROG}: error: {e}", file= sys.stderr )
        return EXIT_STORAGE
    except LinkSchedError as e :
        print( f"{PROG}: error: {e}", file= sys.stderr )
        return EXIT_INVALID
    except ImportError as e :
        print( f"{PROG}: error: the viewer needs PyQt6 ({e})", file= sys.stderr )
        return EXIT_INVALID

    return EXIT_OK