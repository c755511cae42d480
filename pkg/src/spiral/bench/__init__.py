from .instances import generate_instance
from .stats import bench_stats, quantiles, winners
from .runner import run_bench, run_benchmark, solve_instance
