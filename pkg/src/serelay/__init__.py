"""
Worst-case secrecy rate of a wireless-powered full-duplex relay that
recycles its own loopback energy, with a time-switching baseline and
brute-force oracles for every closed form.
"""
from .beamform import SerSolution, WtMethod, run_algorithm1
from .channel import ChannelSet, SystemConfig, sample_channels, trial_rng
from .errors import (ConfigError, DecompositionFailure, InfeasibleRecycling,
                     InvalidAlpha, InvalidDistance, InvalidInterval,
                     LeakageInfeasible, NotPositiveDefinite, SerelayError,
                     ZeroChannel, ZfInfeasible)
from .harness import (ExperimentSpec, SweepRow, delta_profile, load_config,
                      paper_fixture_channels, run_sweep, write_csv)
from .power_alloc import Branch, PowerSolution, solve_power
from .ser_model import BeamformerSet, SecrecyEvaluation, evaluate
from .tsr_baseline import TsrSolution, run_algorithm2

__version__ = '0.1.0'
