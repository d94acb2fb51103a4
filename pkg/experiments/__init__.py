"""
Эксперименты — серии реплик, подгонка показателей, ЦПТ, итерации.
"""

from .runner import ExperimentConfig, ExperimentResult, replicate_seed, run_experiment
from .fitting import ScalingFit, fit_scaling, invariance_test, level_test, prediction_test, variance_positivity_expected
from .diagnostics import CLTReport, clt_diagnostic, clt_trend, iterated_prediction_test
