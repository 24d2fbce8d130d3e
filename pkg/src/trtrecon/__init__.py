"""Tensor-field tomography: simulation and explicit reconstruction of
symmetric rank-2 tensor fields from transverse ray integrals measured around
coordinate rotation axes."""

from .core import (
    COMPONENT_INDEX,
    COMPONENT_NAMES,
    AxisFrame,
    Ray,
    SymTensorField3,
    VoxelGrid3,
    adjugate2,
    project_transverse,
    slice_field,
)
from .projector import (
    AcquisitionConfig,
    TrtDataSet,
    forward_trt_ray,
    lrt_plane,
    simulate_acquisition,
    trace_ray,
    xray_plane,
)
from .backprojection import adjoint_acquisition, backproject_axis, backproject_plane
from .phantoms import (
    one_axis_null_field,
    potential_field,
    sharp_phantom,
    smooth_phantom,
    two_axis_null_field,
)
from .reconstruct import (
    LambdaTriple,
    MuTriple,
    assemble_lambda,
    assemble_mu,
    consistency_residual,
    reconstruct_three_axis,
    reconstruct_two_axis_potential,
    recover_diagonals_alternative,
    recover_diagonals_fbp,
    solve_offdiagonals,
)
from .spectral import SpectralField, dft3, hamming_derivative, hamming_window, idft3, ramp_multiplier

__version__ = "0.1.0"
