"""Formal property verification toolkit: LTL/SVA properties, explicit-state
model checking, vacuity detection and formal coverage."""
__version__ = "0.1.0"

from .checker import ResourceLimitError, Verdict, check
from .coverage import CoverageReport, coverage_report, formal_coverage, meets_threshold
from .formula import Formula
from .model import Lasso, Model, ModelError, cone_of_influence, load_model
from .parser import ParseError, parse_formula, parse_property
from .printer import pretty_print
from .sva import emit_sva, load_properties, parse_property_text
from .vacuity import VacuityReport, affects, check_vacuity, interesting_witness

__all__ = [
    "__version__", "ResourceLimitError", "Verdict", "check", "CoverageReport", "coverage_report",
    "formal_coverage", "meets_threshold", "Formula", "Lasso", "Model", "ModelError",
    "cone_of_influence", "load_model", "ParseError", "parse_formula", "parse_property",
    "pretty_print", "emit_sva", "load_properties", "parse_property_text", "VacuityReport",
    "affects", "check_vacuity", "interesting_witness",
]
