"""
.. include:: ./../README.md
"""
from .pydantic_utils import *

from .scenario import *
from .polytope import *
from .optimization import *
from .npa import *
from .dataset import *
from .surrogate import *

from .bench import BenchReport, bench_pguess, bench_bell_lp
from .pipeline import PipelineConfig, run_pipeline, load_config, parse_config
from .settings import get_settings, Settings
from .enums import FacetClass, LpStatus, SdpStatus, Activation, ModelKind, RejectReason, ScheduleVariant
from . import errors

__version__ = '0.1.1'
