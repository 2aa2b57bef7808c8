"""
Bench - Workloads, oracle verification, parameter sweeps and I/O traces
"""

from .analysis import OriginFit, fit_through_origin
from .settings import BenchSettings, load_settings
from .workload import WorkloadSpec, generate_workload, parse_mix
from .runner import (
    BenchRow, VerifyReport, Disagreement, NewStructure, BaselineStructure,
    cmd_verify, cmd_sweep, cmd_trace, run_point, write_csv,
)

__all__ = [
    'OriginFit', 'fit_through_origin',
    'BenchSettings', 'load_settings',
    'WorkloadSpec', 'generate_workload', 'parse_mix',
    'BenchRow', 'VerifyReport', 'Disagreement', 'NewStructure', 'BaselineStructure',
    'cmd_verify', 'cmd_sweep', 'cmd_trace', 'run_point', 'write_csv',
]
