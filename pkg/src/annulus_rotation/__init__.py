"""Rotation numbers, drift and prime-end bookkeeping for lifted annulus maps."""
from ._accel import backend
from .arcs import HangingArc, arcs_disjoint, map_arc, nearest_integer, read_arc, relative_winding, write_arc
from .cover import (CallableMap, FullMap, LiftPoint, OrbitSource, RigidRotation, StringSystem,
                    check_deck_commutation, deck, displacement, displacement_bound)
from .errors import (AnnulusError, HalfIntegerError, IntersectionError, NumericalError,
                     PreconditionError, RegionError, UnsupportedSourceError)
from .gallery import (MarkedSystem, build_boomerang_example, build_horseshoe, build_periodic_strings,
                      build_system, build_transverse_example, proxy_prime_end_rotation, verify_invariance)
from .horseshoe import (HorseshoeSystem, SymbolCode, code_to_point, itinerary_shift_check,
                        rotation_bounds_from_code, verify_shift_bound)
from .rotation import (classify_drift, drift_series, empirical_measure_rotation, h1_check,
                       h2_witness_search, iterate_orbit, rotation_estimate, subsampled_drift_gap)

__version__ = "0.1.0"
