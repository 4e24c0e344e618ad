"""Simulation and verification toolkit for size-conditioned critical
Galton-Watson trees: exact conditioned samplers built on the tree/path
bijection and the first-minimum rotation, generation-profile transforms,
size-biased spine constructions, limit-process approximation and the
distributional test machinery that validates all of it."""

from .lamperti import (PiecewiseLinear, ProfileTriple, StepFunction,
                       harmonic_integral, height_transform, profile_triple,
                       time_change)
from .limitproc import (LimitProfile, LimitSample, sample_brownian_excursion,
                        sample_limit, sample_limit_excursion,
                        sample_limit_profile)
from .mcstats import ExperimentSpec, RunResult, replicate_stream, run
from .offspring import (OffspringLaw, SizeBiasedLaw, TiltedLaw, height_cdf,
                        height_survival, scaling_sequence, size_bias, tilt,
                        total_size_pmf, truncated_second_moment)
from .paths import (LatticePath, NotAnExcursionError, decode_path, encode_tree,
                    first_min_index, rescale, rotate_to_excursion,
                    sample_cgw_tree, sample_conditioned_increments,
                    sample_conditioned_increments_batch)
from .spine import (SpineSample, exact_prob_size_biased, sample_size_biased,
                    sample_spine_truncated)
from .stats import (EmpiricalSample, GaussianDensity, height_tail_check,
                    height_tail_ladder, ks_distance, ks_threshold,
                    local_limit_check, tv_discrete, w1_distance)
from .trees import OrderedTree, enumerate_trees

__version__ = "0.1.0"
