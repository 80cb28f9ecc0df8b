"""
LinkSched - Test Fixtures
"""

from typing import List

import numpy as np
import pytest

from src.core.channel_sim import Layout, SimConfig
from src.core.spd_geometry import SpdMatrix
from src.utils.config import ExperimentSpec


def random_spd ( rng: np.random.Generator, n: int, cond: float = 1e3 ) -> np.ndarray :
    """Random SPD matrix with eigenvalues spread over [1, cond]"""

    q, _ = np.linalg.qr( rng.standard_normal( ( n, n ) ) )
    vals = np.exp( rng.uniform( 0.0, np.log( cond ), size= n ) )
    a = ( q * vals ) @ q.T

    return ( a + a.T ) / 2


def random_spd_list ( rng: np.random.Generator, count: int, n: int, cond: float = 1e3 ) -> List[ SpdMatrix ] :
    return SpdMatrix.stack( [ random_spd( rng, n, cond ) for _ in range( count ) ] )


def diag_points ( rng: np.random.Generator, centre: float, count: int, n: int = 3, spread: float = 0.1 ) -> List[ SpdMatrix ] :
    """SPD matrices exp(diag(x)) with x around centre"""

    return SpdMatrix.stack( [
        np.diag( np.exp( centre + spread * rng.standard_normal( n ) ) ) for _ in range( count )
    ] )


@pytest.fixture
def rng () -> np.random.Generator :
    return np.random.default_rng( 20240611 )


@pytest.fixture
def two_pair_layout () -> Layout :
    """K = 2 on a line: d00 = 10, d10 = 90, d11 = 10, d01 = 110"""

    cfg = SimConfig( K= 2, field_length= 200.0 )
    return Layout( cfg, [ [ 0.0, 0.0 ], [ 100.0, 0.0 ] ], [ [ 10.0, 0.0 ], [ 110.0, 0.0 ] ] )


@pytest.fixture
def tiny_spec () -> ExperimentSpec :
    return ExperimentSpec(
        sim= SimConfig( K= 4 ), n_train_layouts= 6, n_test_layouts= 5,
        field_lengths= ( 150.0, ), cv_folds= 2, bandwidth_grid= ( 0.5, 1.0, 2.0 ),
        timing_layouts= 2, timing_repeats= 2
    )
