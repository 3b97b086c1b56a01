"""Water footprint modeling for HPC systems.

Embodied water of the hardware, direct (cooling) and indirect (electricity
generation) operational water, scarcity weighting, withdrawal accounting
and the what-if analyses built on them.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    LITERS_PER_US_GALLON,
    DeviceKind,
    DeviceSpec,
    EmbodiedBreakdown,
    HardwareInventory,
    ProcessParams,
    WaterVolume,
)
from .embodied import (  # noqa: E402
    embodied_footprint,
    manufacturing_water_processor,
    manufacturing_water_storage,
    packaging_water,
)
from .errors import (  # noqa: E402
    AlignmentError,
    ParameterResolutionError,
    ValidationError,
    WaterModelError,
)
from .operational import (  # noqa: E402
    EnergyMixSample,
    EnergyMixSeries,
    IntensitySeries,
    PowerTrace,
    SourceFactors,
    WeatherSample,
    WeatherSeries,
    WueCurve,
    build_intensity_series,
    carbon_intensity_of_mix,
    ewf_of_mix,
    operational_footprint,
    water_intensity,
    wet_bulb_temperature,
    wue_at,
)
from .scarcity import (  # noqa: E402
    GridSupplyShare,
    ScarcityIndex,
    adjust_intensity_split,
    adjust_intensity_uniform,
    effective_indirect_wsi,
)
from .withdrawal import WithdrawalParams, adjusted_discharge, water_reuse  # noqa: E402

# ``withdrawal()`` lives in :mod:`hpcwater.withdrawal`; re-exporting it here
# would hide the submodule of the same name.

__all__ = [
    "AlignmentError",
    "DeviceKind",
    "DeviceSpec",
    "EmbodiedBreakdown",
    "EnergyMixSample",
    "EnergyMixSeries",
    "GridSupplyShare",
    "HardwareInventory",
    "IntensitySeries",
    "LITERS_PER_US_GALLON",
    "ParameterResolutionError",
    "PowerTrace",
    "ProcessParams",
    "ScarcityIndex",
    "SourceFactors",
    "ValidationError",
    "WaterModelError",
    "WaterVolume",
    "WeatherSample",
    "WeatherSeries",
    "WithdrawalParams",
    "WueCurve",
    "adjust_intensity_split",
    "adjust_intensity_uniform",
    "adjusted_discharge",
    "build_intensity_series",
    "carbon_intensity_of_mix",
    "effective_indirect_wsi",
    "embodied_footprint",
    "ewf_of_mix",
    "manufacturing_water_processor",
    "manufacturing_water_storage",
    "operational_footprint",
    "packaging_water",
    "water_intensity",
    "water_reuse",
    "wet_bulb_temperature",
    "wue_at",
    "__version__",
]
