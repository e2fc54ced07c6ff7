"""curvlab: numerical laboratory for curvature-weighted Sobolev inequalities.

The package verifies, at desk scale, weighted Sobolev/Morrey/Trudinger
inequalities whose weight is a power of the level-set mean curvature, the
isoperimetric chain behind them, the cube-collar counterexample family for
small curvature exponents, and the a-priori estimates they imply for
semi-stable radial solutions of -Delta u = lambda f(u).
"""

from .checks import (Verdict, morrey_check, pinf_check, sobolev_check,
                     subcritical_check, trudinger_check)
from .constants import (A2Mode, ConstantBundle, IsoperimetricConstants,
                        ball_volume, constants, sphere_area,
                        subcritical_constant)
from .counterexample import (BumpIntegralCutoff, CounterexampleReport,
                             build_cube_counterexample, counterexample_report,
                             cube_distance)
from .errors import (BadEpsilon, CurvlabError, DegenerateQuotient, EigFailed,
                     InconclusiveBranch, IrregularLevel, MissingExponent,
                     NonintegrableWeight, NoSolutionAtM, NotSemistable,
                     ShootDiverged, UnknownFamily, WrongRegime)
from .estimates import (gradient_estimate_check, linf_estimate_check,
                        lq_estimate_check, pohozaev_and_nedev,
                        stability_geometric_check)
from .exponents import (INF, ExponentRegime, InequalityParams, RegimeVerdict,
                        critical_exponent, is_inf, regime_classify,
                        sharp_radial_exponents)
from .gelfand import (BranchPoint, BranchSolver, ExtremalEstimate,
                      Nonlinearity, dirichlet_radial_eigenvalue,
                      exp_nonlinearity, extremal_estimate,
                      nonlinearity_from_spec, ode_residual,
                      power_nonlinearity, shoot, solve_branch,
                      stability_eigenvalue, stability_mu1, tol_eig,
                      user_nonlinearity)
from .geometry import (ScalarField, curvature_energy,
                       curvature_energy_with_flag, gradient, gradient_norm,
                       lq_norm, mean_curvature, radial_field)
from .levelsets import (LevelSetStats, coarea_check, default_t_grid,
                        distribution_and_perimeter, distribution_volume,
                        level_surface_integral, perimeter, verify_key_chain)
from .radial import (RadialProfile, builtin_profile_suite, family_profile,
                     radial_lq_norm, radial_weighted_energy, sharpness_scan,
                     sobolev_quotient)

__version__ = "0.1.0"
