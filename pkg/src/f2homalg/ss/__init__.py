"""Multiplicative spectral sequences over F₂: pages, propagation, page turning, fibers."""

from .conventions import Convention, ConventionError
from .engine import (AuditEntry, Comparison, DifferentialRule, DSquaredError, InconsistentRulesError,
                     KeyPage, Page, PageDifferential, RuleError, RunResult, SSError,
                     UnderdeterminedError, Window, WindowError, check_rule, e2_page, propagate,
                     run_pages, turn_page)
from .fiber import (FiberError, FiberResult, GradedMap, GradedSpace, TableEntry, collapse,
                    fiber_of_pair, presented_space, table_map)
from .maps import MonomialMap, evaluate, induced_einf_map, substitute
from .scenario import Scenario, ScenarioError, emit_scenario, parse_scenario

__all__ = [
    "AuditEntry", "Comparison", "Convention", "ConventionError", "DSquaredError",
    "DifferentialRule", "FiberError", "FiberResult", "GradedMap", "GradedSpace",
    "InconsistentRulesError", "KeyPage", "MonomialMap", "Page", "PageDifferential", "RuleError",
    "RunResult", "SSError", "Scenario", "ScenarioError", "TableEntry", "UnderdeterminedError",
    "Window", "WindowError", "check_rule", "collapse", "e2_page", "emit_scenario", "evaluate",
    "fiber_of_pair", "induced_einf_map", "parse_scenario", "presented_space", "propagate",
    "run_pages", "substitute", "table_map", "turn_page",
]
