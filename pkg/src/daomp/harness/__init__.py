"""Monte-Carlo experiment harness: configs, sweeps, CSV/SVG output, traces."""

from .config import ConfigError, ExperimentConfig, config_from_text, load_config, save_config
from .experiment import PointSummary, SweepResult, TrialResult, nmse, run_sweep
from .output import emit_outputs, read_csv, replot, write_csv, write_svg
from .presets import PRESETS, fig2_trace, fig3, fig4, fig5, fig6
from .trace import TraceResult, trace_experiment, write_trace
