"""Frequency-domain two-port simulator for Purcell-filtered qubit readout.

Chains of transmission lines, lumped reactances, and stepped-impedance
filters are composed as ABCD matrices; the environmental admittance at the
qubit port yields the Purcell lifetime bound, band structure, and the
lifetime-bandwidth figure of merit.
"""
from .elements import (C0, CpwGeometry, LumpedElement, LumpedKind, TLineSpec,
                       cpw_characteristics, elliptic_k, lumped_abcd,
                       open_stub_admittance, open_stub_shunt_abcd,
                       propagation_constant, tline_abcd)
from .errors import (AmbiguousResonanceError, CalibrationError, ConfigError,
                     PassivityError, SimulationError, SingularityError,
                     UsageError, ValidationError)
from .purcell import (UNBOUNDED, QubitSpec, ReadoutSpec, Scenario,
                      ScenarioKind, calibrate_readout, env_admittance,
                      find_dips, lifetime_bandwidth_fom, linewidth_kappa,
                      purcell_t1, t1_sweep, total_t1)
from .results import SweepResult, make_grid
from .sipf import (BandTransition, SipfSpec, band_edges,
                   calibrate_section_lengths, dispersion_lhs, filter_response,
                   sipf_abcd)
from .touchstone import emit_touchstone, read_touchstone
from .twoport import (IDENTITY, OPEN, SParams2, TwoPortABCD, abcd_to_sparams,
                      cascade, input_impedance)
from .version import __version__

__all__ = [name for name in dir() if not name.startswith("_")]
