"""Structure-preserving model order reduction by interpolation.

Frequency-affine structured systems, Loewner identification, TF-IRKA,
structure-preserving TF-IRKA and the adaptive region-targeted StrAIKA.
"""

from .errors import (StrMORError, DimensionMismatch, SingularTermPoint, SingularK, SingularPencil,
                     NotConjugationClosed, DuplicatePoint, OddSampleCount, CoincidentPoints,
                     MissingDerivative, NoFiniteEigenvalues, ImaginaryAxisPole, EmptySelection,
                     BadSectioning, BadIOSpec, ParseError)
from .instrument import count_evaluations
from .interpolation import (InterpolationData, ProjectionBases, build_tangential_bases,
                            project, realify_bases)
from .irka import IterationOptions, ReductionReport, convergence_metric, sptf_irka, tf_irka
from .loewner import (IdentifyOptions, LoewnerRealization, TangentialDataset, TransferSample, build_hermite_loewner,
                      build_loewner, identify, partition_samples, realify_loewner, sample,
                      truncate_loewner)
from .numerics import DEFAULTS, EigenTriple, NumericsConfig, generalized_eig
from .straika import FrequencyRegion, StraikaOptions, pole_dominance, select_in_region, straika
from .system import (StructuredSystem, TransferFunction, make_delay, make_first_order, make_gun,
                     make_second_order, make_viscoelastic)
from .terms import Constant, ExpDelay, FractionalKelvin, Monomial, SqrtShift, term_from_dict

__version__ = "0.1.0"
