from ..topology import generate_topology
from .configfile import dumps_config, load_config, loads_config
from .experiment import ExperimentSpec, figure5_config, run_experiment, run_figure5
from .svg import plot_traces
from .traces import format_trace_csv, parse_trace_csv, read_trace_csv, write_trace_csv
