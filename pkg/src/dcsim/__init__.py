"""dcsim: multi-party privacy-preserving learning simulator.

Implements federated averaging, data collaboration analysis (DC), and data
collaboration analysis with projection data (DCPd), together with the
partitioners, anchor strategies, from-scratch MLP trainer, metrics, and the
experiment harness needed to compare them under IID and label-skewed splits.
"""

from .errors import (
    DatasetFormatError,
    DcsimError,
    InvalidArgumentError,
    TrainingDivergedError,
    UndefinedMetricError,
)

__all__ = [
    "DatasetFormatError",
    "DcsimError",
    "InvalidArgumentError",
    "TrainingDivergedError",
    "UndefinedMetricError",
]

__version__ = "0.1.0"
