"""Minimum density hyperplanes for clustering and semi-supervised classification.

A hyperplane is scored by the integral of a Gaussian kernel density estimate
along it, which reduces exactly to a one-dimensional KDE of the projections
of the data onto the hyperplane normal.  The normal direction is found by
projection pursuit: BFGS over spherical coordinates of a penalised projection
index, with annealing of the feasible-interval width (and, for partially
labelled data, of the label-penalty weight).
"""

from .data_io import Dataset, LabeledSubset, load_csv, center, standardize, \
    principal_components, default_bandwidth, DataError, DegenerateDataError
from .geometry import Hyperplane, angles_to_unit_vector, unit_vector_to_angles, \
    spherical_jacobian, project, margin, partition
from .kde1d import ProjectedKde, density_integral, d_integral_db, \
    d_integral_dpoints, lipschitz_bound, grid_evaluate, find_local_extrema
from .objective import PenaltyParams, InnerSolution, feasible_interval, f_cl, \
    f_ssc, minimize_over_b, phi_value_and_gradient
from .optimizer import MdhConfig, MdhResult, bfgs_minimize, relative_depth, \
    mdp2_cluster, mdp2_ssc, train_init_svm
from .metrics import PartitionMetrics, aggregate_clusters, success_ratio, \
    binary_v_measure, classification_error

__version__ = "0.1.0"
