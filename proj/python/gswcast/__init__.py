"""GSW sampling, subset-sum estimation and ARIMA forecasting over time-series tables."""

from ._gswcast import (
    ArmaModel,
    Constraint,
    Error,
    Estimate,
    ForecastResult,
    GswSample,
    Table,
    consistency,
    estimate_sum,
    exact_subset_sum,
    expected_sample_size,
    fit_arima,
    forecast,
    gsw_draw,
    gsw_update,
    l1_distance,
    mean_weights,
    noisy_variance_arma11,
    normal_quantile,
    parse_constraint,
    parse_task,
    rstd_bound,
    run_task_exact,
    run_task_sampled,
    select_order,
    synth_table,
)

__all__ = [
    "ArmaModel",
    "Constraint",
    "Error",
    "Estimate",
    "ForecastResult",
    "GswSample",
    "Table",
    "consistency",
    "estimate_sum",
    "exact_subset_sum",
    "expected_sample_size",
    "fit_arima",
    "forecast",
    "gsw_draw",
    "gsw_update",
    "l1_distance",
    "mean_weights",
    "noisy_variance_arma11",
    "normal_quantile",
    "parse_constraint",
    "parse_task",
    "rstd_bound",
    "run_task_exact",
    "run_task_sampled",
    "select_order",
    "synth_table",
]
