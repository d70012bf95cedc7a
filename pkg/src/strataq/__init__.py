"""strataq: stable graphs, twisted level graphs, and exact coefficient recursions.

The package has five layers:

- ``graphs``: stable dual graphs, canonical forms, bounded enumeration;
- ``twists``: twisted and level structures, bi-/tri-colored enumeration;
- ``rtring``: the rational-tails tautological ring fragment and the inductive
  class construction (``alpha_rt``, ``forget_last``, ``a_symbolic``);
- ``coeffs``: the exact integer coefficient recursions and closed forms;
- ``cli``: the command-line interface.
"""

from .graphs import (
    CanonicalForm,
    StableGraph,
    canonical_form,
    enumerate_stable_graphs,
    from_json_dict,
    genus,
    to_json_dict,
    validate_stable_graph,
)
from .twists import (
    BiColoredGraph,
    TwistedLevelGraph,
    enumerate_bicolored,
    enumerate_tricolored,
    multiplicity,
    single_bubble_graph,
    validate_twist,
)
from .rtring import (
    RTClass,
    XiPoly,
    a_symbolic,
    alpha_rt,
    forget_last,
    increment_delta_rows,
    mul_delta,
    mul_psi,
)
from .coeffs import (
    CoeffTable,
    a_g,
    a_rec,
    elliptic_count,
    odd_spin_count,
    u_seq,
    w_seq,
)

__version__ = "0.1.0"

__all__ = [
    "BiColoredGraph",
    "CanonicalForm",
    "CoeffTable",
    "RTClass",
    "StableGraph",
    "TwistedLevelGraph",
    "XiPoly",
    "a_g",
    "a_rec",
    "a_symbolic",
    "alpha_rt",
    "canonical_form",
    "elliptic_count",
    "enumerate_bicolored",
    "enumerate_stable_graphs",
    "enumerate_tricolored",
    "forget_last",
    "from_json_dict",
    "genus",
    "increment_delta_rows",
    "multiplicity",
    "mul_delta",
    "mul_psi",
    "odd_spin_count",
    "single_bubble_graph",
    "to_json_dict",
    "u_seq",
    "validate_stable_graph",
    "validate_twist",
    "w_seq",
]
