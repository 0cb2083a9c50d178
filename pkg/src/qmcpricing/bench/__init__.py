"""Benchmark harness reproducing the MC vs QMC vs RQMC error studies."""
from .config import (AsianExperimentConfig, BasketExperimentConfig, ConfigError, asian_config_from_dict,
                     basket_config_from_dict, config_hash, load_config)
from .experiments import (asian_reference_prices, basket_options, basket_truths, rqmc_basket_check,
                          run_asian_experiment, run_basket_experiment, run_dimension_sweep)
from .metrics import SlopeFit, fit_slope, mc_rmse_curve, rmse
from .report import RmseReport, RmseRow, read_report_csv, render_svg, write_report

__all__ = [
    "AsianExperimentConfig", "BasketExperimentConfig", "ConfigError", "RmseReport", "RmseRow",
    "SlopeFit", "asian_config_from_dict", "asian_reference_prices", "basket_config_from_dict",
    "basket_options", "basket_truths", "config_hash", "fit_slope", "load_config", "mc_rmse_curve",
    "read_report_csv", "render_svg", "rmse", "rqmc_basket_check", "run_asian_experiment",
    "run_basket_experiment", "run_dimension_sweep", "write_report",
]
