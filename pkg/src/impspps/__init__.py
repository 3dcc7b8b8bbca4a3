"""Formal powers, SPPS solutions and transmutation operators for the
Sturm-Liouville equation in impedance form ``-(a^2 u')' = lambda a^2 u``.

The public names are re-exported from the submodules:

``grid``, ``impedance``, ``operators``
    sampled functions, quadrature, the weighted operators ``J_a``, ``D_a``
``formal_powers``
    the two interleaved families ``phi_a^(k)``, ``phi_{1/a}^(k)``
``spps``, ``oracle``
    spectral parameter power series and independent reference solutions
``dirichlet``
    the Dirichlet spectrum, eigenfunction expansions and the Poisson problem
``approximation``
    best ``L^2_a`` approximation by formal polynomials
``transmutation``, ``kernel_march``
    the transmutation kernels, the operator ``T_a`` and its inverse
"""

from .approximation import (
    Projection,
    approximation_study,
    error_report,
    project_L2a,
    sobolev_approximant,
    target_function,
)
from .dirichlet import (
    CharacteristicFunction,
    EigenPair,
    characteristic_function,
    dirichlet_eigenpairs,
    find_eigenvalues,
    fourier_expand,
    solve_dirichlet_poisson,
)
from .errors import (
    ConfigurationError,
    GridMismatchError,
    IllConditionedWarning,
    ImpSppsError,
    InvalidImpedanceError,
    IterationLimitError,
    PreconditionError,
    SpectralRangeError,
    StiffnessError,
)
from .formal_powers import (
    FormalPolynomial,
    FormalPowerTable,
    build_formal_powers,
    generalized_derivative,
    generalized_integral,
    perturbation_convergence_check,
    taylor_expand,
)
from .grid import Grid, SampledFunction, cumulative_integral, quadrature_weights, stencil_derivative
from .impedance import (
    Impedance,
    affine_impedance,
    exponential_impedance,
    function_impedance,
    impedance_from_id,
    reciprocal_impedance,
    sampled_impedance,
    unit_impedance,
    validate_proper,
)
from .kernel_march import march_kernels
from .operators import op_D, op_J, op_L, op_R
from .oracle import OracleSolution, closed_form, closed_form_points, ode_solve
from .spps import SppsSolution, estimate_check, spps_darboux_derivative, spps_eval, spps_solution, wronskian
from .transmutation import (
    KernelPair,
    TransmutationKernel,
    apply_T,
    apply_T_derivative,
    apply_T_inverse,
    build_kernel,
    build_kernel_pair,
    check_goursat,
    check_kernel_relations,
    check_mapping_property,
    check_transmutation_property,
    kernel_l2_norm,
)

__version__ = "0.1.0"
