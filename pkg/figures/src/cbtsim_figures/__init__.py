"""Figure scripts for the simulator's CSV outputs.

Pure readers: the boundary to the simulator is the documented CSV schema,
never an in-process import.  Re-running any script is idempotent.
"""

__version__ = "0.1.0"
