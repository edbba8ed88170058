"""Spectral-theoretic toolkit for matrix Schrodinger operators on the line.

Computes normalized fundamental solutions, half-line Weyl-Titchmarsh
M-matrices, Green's matrices, matrix xi functions, spectral measures,
Floquet band spectra, trace-formula potential reconstruction, and runs a
Borg-type uniqueness verification pipeline at desk scale.
"""

from .potentials import (
    PotentialError,
    PotentialSpec,
    build_potential,
    constant_potential,
    free_potential,
    hamiltonian_coefficients,
)
from .propagator import (
    FundamentalSystem,
    FrameTransport,
    PropagationError,
    RankCollapseError,
    integrate_fundamental,
    propagate_frame,
)
from .weyl import (
    AsymptoticSeries,
    ConvergenceError,
    WeylMatrix,
    asymptotic_coefficients,
    asymptotic_eval,
    riccati_defect,
    weyl_disk_approx,
    weyl_m,
)
from .herglotz import (
    BranchCutError,
    HerglotzReport,
    SpectralMeasureIncrement,
    XiMatrix,
    boundary_density,
    herglotz_verify,
    principal_matrix_log,
    stieltjes_measure,
    xi_matrix,
)
from .green import (
    BlockWeylMatrix,
    GreenDiagonal,
    GreenKernel,
    block_weyl,
    green_diagonal,
    green_diagonal_evaluator,
    green_kernel,
    green_x_derivative,
)
from .floquet import (
    BandSpectrum,
    BoundaryWeyl,
    FloquetSplit,
    MonodromyMatrix,
    SpectrumError,
    band_spectrum,
    boundary_weyl,
    dirichlet_spectrum,
    floquet_weyl,
    monodromy,
)
from .trace import (
    TraceReconstruction,
    expansion_coefficients_g,
    higher_trace_invariant,
    reconstruct_potential,
)
from .reflectionless import (
    BorgVerdict,
    ReflectionlessReport,
    band_interior_grid,
    borg_verify,
    check_reflectionless,
    make_xi_field,
)

__version__ = "0.1.0"
