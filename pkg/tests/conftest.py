import numpy as np
import pytest

from krklab import tablebase
from krklab.dataset import EncodedMatrix, EncodingScheme, FittedEncoding


@pytest.fixture(scope="session")
def tb():
    """The solved tablebase; built once for the whole run (~2s)."""
    return tablebase.solve()


@pytest.fixture(scope="session")
def oracle_records(tb):
    return tablebase.export_dataset(tb)


def toy_matrix(X, y, n_classes=None, scheme=EncodingScheme("ordinal", "none")):
    """Wrap raw arrays as an EncodedMatrix with a synthetic class order."""
    y = np.asarray(y, dtype=np.int64)
    k = n_classes or int(y.max()) + 1
    order = tuple(f"c{i}" for i in range(k))
    return EncodedMatrix(np.asarray(X, dtype=np.float64), y, FittedEncoding(scheme), order)
