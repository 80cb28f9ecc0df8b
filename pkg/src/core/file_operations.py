"""
LinkSched - File Operations Module
Handles low-level reading and writing of experiment files (JSON, JSON Lines, CSV)
"""

from typing import Dict, Iterable, List, Sequence

import csv
import io
import json
import logging
import os

from .errors import StorageError

logger = logging.getLogger( __name__ )


class FileOperations :
    """Handles file operations below one output directory"""

    def __init__ ( self, root_dir: str = "." ) :
        self.root_dir = root_dir


    def get_file_path ( self, *parts: str ) -> str :
        """Get file path below the root directory"""

        return os.path.join( self.root_dir, *parts )


    def file_exists ( self, *parts: str ) -> bool :
        """Check if file exists"""

        return os.path.isfile( self.get_file_path( *parts ) )


    def _write_text ( self, file_path: str, text: str ) -> None :
        """Write text, creating parent directories"""

        try :
            parent = os.path.dirname( file_path )
            if parent :
                os.makedirs( parent, exist_ok= True )
            with open( file_path, "w", encoding= "utf-8", newline= "" ) as f :
                f.write( text )
        except OSError as e :
            raise StorageError( file_path, e.strerror or str( e ) ) from e

        logger.info( "Wrote %s", file_path )


    def _read_text ( self, file_path: str ) -> str :
        try :
            with open( file_path, "r", encoding= "utf-8", newline= "" ) as f :
                return f.read()
        except FileNotFoundError as e :
            raise StorageError( file_path, "file not found" ) from e
        except OSError as e :
            raise StorageError( file_path, e.strerror or str( e ) ) from e


    def read_json_file ( self, file_path: str ) -> Dict :
        """Read JSON data from file"""

        text = self._read_text( file_path )

        try :
            return json.loads( text )
        except json.JSONDecodeError as e :
            raise StorageError( file_path, f"invalid JSON ({e.msg} at line {e.lineno})" ) from e


    def write_json_file ( self, file_path: str, data: Dict, compress: bool = False ) -> None :
        """Write JSON data to file (sorted keys, so equal data gives equal bytes)"""

        text = json.dumps( data, ensure_ascii= False, sort_keys= True, indent= None if compress else 2 )
        self._write_text( file_path, text + "\n" )


    def read_jsonl_file ( self, file_path: str ) -> List[ Dict ] :
        """Read one JSON record per line, skipping blank lines"""

        records = []
        for n, line in enumerate( self._read_text( file_path ).splitlines(), start= 1 ) :
            if not line.strip() :
                continue
            try :
                records.append( json.loads( line ) )
            except json.JSONDecodeError as e :
                raise StorageError( file_path, f"invalid JSON on line {n} ({e.msg})" ) from e

        return records


    def write_jsonl_file ( self, file_path: str, records: Iterable[ Dict ] ) -> None :
        """Write one compact JSON record per line"""

        lines = [ json.dumps( r, ensure_ascii= False, sort_keys= True, separators= ( ",", ":" ) ) for r in records ]
        self._write_text( file_path, "".join( line + "\n" for line in lines ) )


    def read_csv_file ( self, file_path: str ) -> List[ Dict[ str, str ] ] :
        """Read a CSV file with a header row into dicts"""

        return list( csv.DictReader( io.StringIO( self._read_text( file_path ) ) ) )


    def write_csv_file (
        self, file_path: str, header: Sequence[ str ], rows: Iterable[ Sequence ]
    ) -> None :
        """Write a header row followed by data rows, '\\n' line endings"""

        buf = io.StringIO()
        writer = csv.writer( buf, lineterminator= "\n" )
        writer.writerow( header )
        writer.writerows( rows )

        self._write_text( file_path, buf.getvalue() )
