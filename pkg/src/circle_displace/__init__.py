"""Displacement sequences of orientation-preserving circle homeomorphisms.

The library represents circle homeomorphisms by degree-one lifts and
computes, on the rational side, periodic structures, approach-time
functions, basin shreds, and a universal iteration bound; on the irrational
side, displacement distributions, explicit densities, Fortet-Mourier
distances, Birkhoff frequencies, and recurrence bounds; plus an
integrate-and-fire front end whose interspike-interval sequences are
displacement sequences of the firing map.
"""

from .errors import (CircleDisplaceError, ClassificationError, ConvergenceError,
                     InvalidMapError, InverseError, NonFiringError,
                     SingularMeasureError, VerificationError)
from .ifm import FiringModel, firing_lift, firing_map, isi_sequence
from .maps import (Lift, MapSpec, lift_from_callable, lift_inverse, make_arnold,
                   make_conjugated, make_rotation, make_sine_perturb,
                   make_unit_graph, perturb_lift)
from .measures import (ConjugacyEstimate, DensityProfile, EmpiricalMeasure,
                       birkhoff_frequency, concentration_interval,
                       density_bin_masses, density_profile,
                       displacement_density, displacement_pushforward,
                       distribution_mean, empirical_conjugacy, fortet_mourier,
                       sample_displacement_distribution, stability_check)
from .orbits import (DisplacementSeries, Orbit, RotationEstimate,
                     displacement_sequence, iterate, recurrence_gap_bound,
                     rotation_number, rotation_number_via_displacements,
                     rotation_number_weighted)
from .rational import (IntervalInfo, PeriodicStructure, ShredResult,
                       compute_shred, find_m_tilde, find_periodic_points,
                       shred_table, tau_grid, tau_minus, tau_plus,
                       u_minus_boundary, u_plus_boundary, universal_N,
                       verify_asymptotic_periodicity, verify_forward_backward)
from .util import GOLDEN_MEAN, circle_dist

__version__ = "0.1.0"

__all__ = [
    "CircleDisplaceError", "ClassificationError", "ConvergenceError",
    "InvalidMapError", "InverseError", "NonFiringError", "SingularMeasureError",
    "VerificationError",
    "Lift", "MapSpec", "lift_from_callable", "lift_inverse", "make_arnold",
    "make_conjugated", "make_rotation", "make_sine_perturb", "make_unit_graph",
    "perturb_lift",
    "Orbit", "DisplacementSeries", "RotationEstimate", "iterate",
    "displacement_sequence", "rotation_number", "rotation_number_via_displacements",
    "rotation_number_weighted", "recurrence_gap_bound",
    "IntervalInfo", "PeriodicStructure", "ShredResult", "find_periodic_points",
    "tau_plus", "tau_minus", "tau_grid", "u_plus_boundary", "u_minus_boundary",
    "find_m_tilde", "compute_shred", "universal_N", "shred_table",
    "verify_asymptotic_periodicity", "verify_forward_backward",
    "EmpiricalMeasure", "ConjugacyEstimate", "DensityProfile",
    "concentration_interval", "empirical_conjugacy", "displacement_pushforward",
    "sample_displacement_distribution", "displacement_density", "density_profile",
    "density_bin_masses", "fortet_mourier", "birkhoff_frequency",
    "stability_check", "distribution_mean",
    "FiringModel", "firing_map", "firing_lift", "isi_sequence",
    "GOLDEN_MEAN", "circle_dist",
]
