# Command registrars
from .sweep import register as sweep_command
from .sample import register as sample_command
from .hv import register as hv_command
from .postselect import register as postselect_command

__all__ = ["sweep_command", "sample_command", "hv_command", "postselect_command"]
