"""Approximately Hadamard ±1 matrices of every order, with spectral certificates."""

__version__ = "0.1.0"

from .assembly import AssemblyReport, BlockPlan, assemble  # noqa: E402
from .config import RunConfig  # noqa: E402
from .spectral import SpectralReport, condition_number, spectral_report  # noqa: E402

__all__ = [
    "AssemblyReport",
    "BlockPlan",
    "RunConfig",
    "SpectralReport",
    "assemble",
    "condition_number",
    "spectral_report",
]
