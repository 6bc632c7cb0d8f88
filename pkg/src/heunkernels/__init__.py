"""Integral-equation kernels for the Heun and confluent Heun equations.

Submodules: ``numerics`` (guarded complex arithmetic and 2-jets), ``specialfn``
(Gauss and confluent hypergeometric functions), ``heun_ops`` (operators and
local solutions), ``transform_group`` (the 192-element solution group and its
confluent analogue), ``kernel_engine`` (kernel expressions and checks),
``kernel_catalog`` (the named kernel families), ``verification`` and ``cli``.
"""

from .errors import HeunKernelError
from .heun_ops import CheParams, HeunParams
from .kernel_catalog import FAMILIES, KernelFamilyId
from .transform_group import che_group, generate_group, homotopic, mobius

__version__ = "0.1.0"

__all__ = [
    "CheParams",
    "FAMILIES",
    "HeunKernelError",
    "HeunParams",
    "KernelFamilyId",
    "che_group",
    "generate_group",
    "homotopic",
    "mobius",
]
