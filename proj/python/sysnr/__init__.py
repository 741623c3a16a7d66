"""Regression-type estimators of a population mean under systematic sampling
with non-response (Hansen-Hurwitz sub-sampling)."""

from ._core import (
    Design,
    DegenerateError,
    DomainError,
    Error,
    EvaluationError,
    IoError,
    NonResponse,
    ParseError,
    Population,
    SchemaError,
    SpecError,
    Summary,
    TheoryResult,
    generate_population,
    intraclass_correlation,
    load_population,
    murthy_grid,
    murthy_published,
    murthy_summary,
    simulate,
    summarize,
    theory_hh,
    theory_lr,
    theory_t1,
    theory_t2,
    theory_t3,
    theory_table,
    var_hh,
)

__version__ = "0.1.0"
