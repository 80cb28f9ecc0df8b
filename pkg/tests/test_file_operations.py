"""
LinkSched - File operations tests
"""

import os

import pytest

from src.core.errors import StorageError
from src.core.file_operations import FileOperations


def test_json_is_written_with_sorted_keys ( tmp_path ) :
    ops = FileOperations( str( tmp_path ) )
    path = ops.get_file_path( "a", "b.json" )
    ops.write_json_file( path, { "z": 1, "a": [ 0.1, 2 ] } )

    text = open( path, encoding= "utf-8" ).read()
    assert text.index( '"a"' ) < text.index( '"z"' ) and text.endswith( "}\n" )
    assert ops.read_json_file( path ) == { "a": [ 0.1, 2 ], "z": 1 }
    assert ops.file_exists( "a", "b.json" )


def test_jsonl_and_csv ( tmp_path ) :
    ops = FileOperations( str( tmp_path ) )
    lines = ops.get_file_path( "x.jsonl" )
    ops.write_jsonl_file( lines, [ { "i": 1 }, { "i": 2 } ] )

    assert ops.read_jsonl_file( lines ) == [ { "i": 1 }, { "i": 2 } ]

    table = ops.get_file_path( "t.csv" )
    ops.write_csv_file( table, [ "a", "b" ], [ [ 1, "" ], [ 2, "x" ] ] )

    assert open( table, encoding= "utf-8" ).read() == "a,b\n1,\n2,x\n"
    assert ops.read_csv_file( table ) == [ { "a": "1", "b": "" }, { "a": "2", "b": "x" } ]


def test_errors_carry_the_path ( tmp_path ) :
    ops = FileOperations( str( tmp_path ) )
    missing = ops.get_file_path( "missing.json" )

    with pytest.raises( StorageError ) as err :
        ops.read_json_file( missing )
    assert err.value.path == missing and "missing.json" in str( err.value )

    broken = ops.get_file_path( "broken.jsonl" )
    with open( broken, "w", encoding= "utf-8" ) as f :
        f.write( '{"ok": 1}\n{oops\n' )
    with pytest.raises( StorageError, match= "line 2" ) :
        ops.read_jsonl_file( broken )

    blocker = ops.get_file_path( "file" )
    open( blocker, "w" ).close()
    with pytest.raises( StorageError ) :
        ops.write_json_file( os.path.join( blocker, "inside.json" ), {} )
