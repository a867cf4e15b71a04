"""Core algorithms: NCCW data, conjugacy, spectra and towers."""
from .nccw import dualize, twisted_graphs, validate_nccw
from .reduction import decompose, to_reduced_form
from .classify import center_spectrum, decide_conjugacy, decide_via_spectrum, rigidity_check
from .congruence import congruence_test
from .appbr import build_appbr
from .spectrum import analyze, graph_homeomorphic, spec_b, spec_b_gen
from .k33 import find_k33, verify_k33
from .paths import connect_points
from .tower import build_stage, build_tower
from .connector import ConnectorMap, connector
from .lifting import connect_through_tower, lift_path
from .invariants import bisection_census, compare_towers, ends_tree, invariant_sequence, k33_witness

__all__ = [
    'dualize', 'twisted_graphs', 'validate_nccw',
    'decompose', 'to_reduced_form',
    'center_spectrum', 'decide_conjugacy', 'decide_via_spectrum', 'rigidity_check',
    'congruence_test', 'build_appbr',
    'analyze', 'graph_homeomorphic', 'spec_b', 'spec_b_gen',
    'find_k33', 'verify_k33',
    'connect_points', 'build_stage', 'build_tower', 'ConnectorMap', 'connector', 'lift_path', 'connect_through_tower',
    'bisection_census', 'compare_towers', 'ends_tree', 'invariant_sequence', 'k33_witness',
]
