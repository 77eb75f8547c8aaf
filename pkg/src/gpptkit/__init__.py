"""Generalized principal pivot transforms of partitioned matrices.

Submodules: ``numkern`` (SVD, pseudoinverse, subspace predicates), ``gppt``
(the transforms and their characterizations), ``lcpcone`` (P+/R+ classes and
small LCPs) and ``verify`` (generators, theorem checkers, fixtures).
"""

from .gppt import PartitionedMatrix, gppt_a, gppt_d, schur_complements
from .numkern import DEFAULT_TOL, ToleranceConfig, pinv, rank, svd

__version__ = "0.1.0"
