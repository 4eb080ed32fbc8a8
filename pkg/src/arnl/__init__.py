"""2x grayscale image upscaling via weighted local autoregressive modeling
and nonlocal 3-D sparse shrinkage, solved by a Split-Bregman iteration."""

from .ar_local import (ARModel, DIAGONAL4, NeighborLayout, PatchWeightParams,
                       fit_ar_pinv_baseline, fit_ar_wls, local_ar_energy,
                       patch_weights, predict_ar)
from .bicubic import bicubic_upscale, keys_kernel
from .image_core import as_image, crop, pad_reflect
from .imageio import read_image, write_image
from .metrics import mse, psnr
from .nonlocal3d import (BlockMatchParams, BlockStack, dct1_forward, dct1_inverse,
                         dwt2_forward, dwt2_inverse, match_blocks, nonlocal_energy,
                         soft_threshold, solve_h_subproblem, transform3d_forward,
                         transform3d_inverse)
from .sampling import SamplingSpec, adjoint_upsample, downsample, sample_mask
from .solver import (ARStageConfig, IterationStats, SolverConfig, SolverState,
                     bregman_update, interpolate, solve_x)

__version__ = "0.1.0"
