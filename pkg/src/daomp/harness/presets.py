"""Ready-made configurations for the standard experiment set."""

from __future__ import annotations

from .config import ExperimentConfig

SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


def fig2_trace(**kw) -> ExperimentConfig:
    """Two paths at delay 0, one delay bin, 128 Doppler bins, SNR 20 dB."""
    base = dict(name="fig2_trace", G_tau=1, G_nu=128, u_nu=2, P_min=2, P_max=2,
                snr_db=20.0, sweep_values=(20.0,), trials=1)
    return ExperimentConfig(**{**base, **kw})


def fig3(G_tau: int = 4, **kw) -> ExperimentConfig:
    """NMSE against SNR for DA-OMP and OMP, rcos and rect dictionaries."""
    base = dict(name=f"fig3_gtau{G_tau}", G_tau=G_tau, G_nu=16, u_nu=2, L_w_frac=0.5,
                sweep_values=SNR_GRID)
    return ExperimentConfig(**{**base, **kw})


def fig4(L_w_frac: float = 0.5, **kw) -> ExperimentConfig:
    """Windowed DA-OMP against SNR for one roll-off length."""
    base = dict(name=f"fig4_lw{int(128 * L_w_frac)}", G_tau=1, G_nu=16, u_nu=2,
                L_w_frac=L_w_frac, sweep_values=SNR_GRID, solvers=("da_omp_rcos",))
    return ExperimentConfig(**{**base, **kw})


def fig5(**kw) -> ExperimentConfig:
    """NMSE against Doppler oversampling at 20 dB; ``G_nu = 8 u_nu``."""
    base = dict(name="fig5_oversampling", G_tau=1, G_nu=16, u_nu=2, snr_db=20.0,
                sweep_var="u_nu", sweep_values=(1.0, 2.0, 4.0, 8.0, 16.0))
    return ExperimentConfig(**{**base, **kw})


def fig6(**kw) -> ExperimentConfig:
    """NMSE against pilot length with ``L_w = L/4`` at 20 dB."""
    base = dict(name="fig6_pilot_length", G_tau=4, G_nu=16, u_nu=2, L_w_frac=0.25,
                snr_db=20.0, sweep_var="L", sweep_values=(128.0, 256.0, 512.0),
                solvers=("da_omp_rcos", "da_omp_rect"))
    return ExperimentConfig(**{**base, **kw})


PRESETS = {
    "fig2": fig2_trace,
    "fig3": fig3,
    "fig3_gtau1": lambda **kw: fig3(1, **kw),
    "fig3_gtau4": lambda **kw: fig3(4, **kw),
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
}
