"""Numerical Riesz-basis diagnostics for -y'' + q(x) y with complex 1-periodic
potential under periodic/antiperiodic boundary conditions."""

from .criteria import (CriterionReport, EquivWindow, asymp_equiv, check_c1,
                       check_c2, check_t1, check_t2, check_t3, check_t4,
                       condition_o_check)
from .diagnostics import (GramReport, MinimalityReport, SlopeFit, fit_decay,
                          gram_condition, pair_angle, uniform_minimality)
from .operator import (BoundaryClass, EigenDecomposition, TruncatedOperator,
                       assemble, eig_dense, eigendecompose)
from .oracle import Discriminant, discriminant, find_pair
from .potential import (DerivedFunctions, FourierSeries, PotentialSpec,
                        derive_qs, fourier_coefficients, normalize_mean)
from .series import (SeriesBundle, SeriesValue, b1_closed_form,
                     balance_residual, series_bundle, series_term)
from .spectrum import (NormalEigenPair, PairClass, PairedSpectrum, alpha_n,
                       build_normal_pair, build_normal_system, classify_pair,
                       extract_uv_and_remainder, pair_spectrum)

__version__ = "0.1.0"
