"""Distributed quantum kernel estimation.

Thin wrapper over the compiled ``_core`` extension.
"""

import json

from ._core import (
    MAX_QUBITS,
    CapacityError,
    ConfigError,
    ContractViolation,
    DataError,
    EncodingError,
    Error,
    FeatureMapSpec,
    ProtocolViolation,
    SvmModel,
    assemble_gram,
    classical_kernel,
    decision_values,
    encode,
    fit_kpca,
    intercept_resend_detection_probability,
    load_dataset,
    predict_svm,
    psd_repair,
    run_session,
    stratified_folds,
    train_svm,
)
from ._core import run_experiment as _run_experiment
from ._core import validate_config as _validate_config

__version__ = "0.1.0"


def run_experiment(config):
    """Run one experiment. ``config`` is a dict or a JSON string."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run_experiment(config)


def validate_config(config, capacity=MAX_QUBITS):
    """Check a config against a qubit capacity without running it."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return json.loads(_validate_config(config, capacity))
