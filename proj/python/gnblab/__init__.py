"""Python bindings for the gnblab C++ library."""

from ._gnblab import (
    ConfigError,
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    ParseError,
    QuadratureError,
    __version__,
    a_cdf,
    fit,
    gg_cdf,
    gg_pdf,
    gnb_pmf,
    gnb_pmf_table,
    gvg_cdf,
    h_cdf,
    identities,
    laws,
    linnik_pdf,
    mittag_leffler_pdf,
    nb_pmf,
    run_suite,
    sample,
    stable_cdf,
    stable_pdf,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
