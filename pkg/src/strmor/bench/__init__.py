"""Benchmark generators, matrix ingestion, error metrics and experiment runner."""

from .generators import GENERATORS, generate_heated_rod, generate_modal_second_order, generate_msd_chain
from .io import load_system, save_system
from .metrics import ErrorSeries, linf_region_error, pointwise_relerr, sigma_values
