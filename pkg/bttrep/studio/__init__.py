"""
Studio Module

This module provides the facade the command line tool drives, with the job
schemas and the regression corpus.
"""

from bttrep.studio.protocols import CountingServiceProtocol, SynthesisServiceProtocol
from bttrep.studio.regression import RegressionCase, default_cases, run_regression
from bttrep.studio.schemas import (
    EnumerationOutput,
    FieldInfoOutput,
    GroupInput,
    JobOptions,
    JobSpec,
    RegressionRow,
    RepresentativeOutput,
)
from bttrep.studio.studio import BttStudio, standard_images

__all__ = [
    # Main class
    "BttStudio",
    "standard_images",
    # Protocols
    "CountingServiceProtocol",
    "SynthesisServiceProtocol",
    # Input schemas
    "GroupInput",
    "JobOptions",
    "JobSpec",
    # Output schemas
    "EnumerationOutput",
    "FieldInfoOutput",
    "RegressionRow",
    "RepresentativeOutput",
    # Regression corpus
    "RegressionCase",
    "default_cases",
    "run_regression",
]
