"""Multi-coil MRI reconstruction by per-column Fredholm systems.

Coil stacks are complex128 arrays shaped (coils, maps, n, m); rows index the
undersampled phase-encode direction.
"""

from ._core import (
    SamplingMask,
    build_A_dft,
    default_roi,
    fft2c,
    ifft2c,
    kernel_eval,
    make_accelerated_mask,
    make_coil_maps,
    make_phantom,
    make_random_mask,
    prepare_g,
    read_coil_stack,
    read_mask,
    reconstruct,
    reconstruct_baseline,
    rel_error,
    simulate_kspace,
    ssim_mean,
    svd_analysis,
    write_coil_stack,
    write_mask,
)

__version__ = "0.1.0"
