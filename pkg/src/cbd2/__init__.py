"""Contextuality analysis of conteXt-conteNt systems with exact rational LPs."""

from .contextuality import (ContextualityReport, CouplingSpec, QuasiCoupling, SystemCoupling,
                            Verdict, build_coupling_spec, check, check_pair_consistency, measure,
                            subsystem)
from .corpus import (CyclicSpec, DichotomizationMap, coarse_grain, dichotomize, gen_cea18,
                     gen_cyclic, prbox, rex_shape)
from .coupling import (CouplingDistribution, PairMaximalityReport, enumerate_multimaximal,
                       is_multimaximal, max_pair_probability, multimaximal_binary,
                       multimaximal_exists)
from .errors import (CbdError, DimensionMismatch, InvalidPartition, InvalidRank, InvalidSplit,
                     MarginalMismatch, NotBinary, ParseError, TooLarge, UnknownCell,
                     UnknownContent, ValidationError, ValueSetMismatch)
from .model import (Bunch, CCSystem, Cell, Connection, Distribution, ValueSet, connection_of,
                    is_consistently_connected, make_system, marginal, validate_system)

__version__ = "0.1.0"
