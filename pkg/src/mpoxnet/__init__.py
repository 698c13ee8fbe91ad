"""Agent-based mpox transmission on a dynamic main/casual/one-time sexual network."""
__version__ = "0.1.0"

from .config import PRESET_NAMES, ScenarioConfig, load_config, preset
from .errors import ConfigurationError, InputError, QueryError
from .kernels import BACKEND as KERNEL_BACKEND
from .metrics import RunResult, ensemble_summary
from .simulation import run_simulation

__all__ = [
    "ScenarioConfig", "preset", "load_config", "PRESET_NAMES",
    "run_simulation", "RunResult", "ensemble_summary",
    "ConfigurationError", "InputError", "QueryError", "KERNEL_BACKEND",
]
