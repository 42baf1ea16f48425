"""Squarefree integers in arithmetic progressions: variance toolkit.

Thin Python facade over the C++ core. Exact wide integers arrive as Python
ints and exact rationals as fractions.Fraction.
"""

try:
    from ._sqfvar import *  # noqa: F401,F403  (installed package layout)
    from ._sqfvar import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package dir
    from _sqfvar import *  # noqa: F401,F403
    from _sqfvar import __version__  # noqa: F401

__all__ = [
    "MobiusTable",
    "sieve_mobius",
    "squarefree_count_segmented",
    "euler_phi",
    "c_constant",
    "unit_group",
    "profile",
    "error_term",
    "variance",
    "t_via_convolution",
    "t_gamma",
    "v_gamma",
    "character_variance",
    "twisted_sum",
    "character_orders",
    "orthogonality_selfcheck",
    "count_primitive_solutions",
    "lemma1_bound",
    "lemma1_exhaustive_check",
    "congruence_count",
    "m_quantity",
    "lemma3_average",
    "sweep",
    "log_spaced_q",
    "default_q_grid",
    "fit_exponents",
    "run_selfcheck",
]
