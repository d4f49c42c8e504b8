"""Few-photon linear optics with photon-counting post-selection."""

from .circuit import Ancilla, Circuit
from .dsl import ParseDiagnostic, ParseError, parse, render
from .elements import (
    BeamSplitter,
    ModePermutation,
    PhaseShifter,
    PolarizingBeamSplitter,
    compose,
    transfer_matrix,
)
from .fock import CapacityError, FockBasis, StateVector, enumerate_basis, inner, sector_basis, tensor
from .gates import (
    PolarizationEncoding,
    builtin_operator,
    core_filter,
    phase_gate,
    polarization_filter,
    verify_all,
)
from .lift import FockOperator, lift, lift_permanent, permanent
from .postselect import (
    EffectiveOperator,
    PostSelectSpec,
    effective_operator,
    outcome_distribution,
    success_probability,
)

__version__ = "0.1.0"
