"""
Services subpackage for decoupling_lab.
One logger-injected service per command-line command.
"""

from .capacity_service import CapacityService
from .code_service import CodeService
from .decouple_service import DecoupleService
from .typicality_service import TypicalityService
