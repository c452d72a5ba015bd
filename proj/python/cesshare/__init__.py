"""Shared energy storage sizing and fair cost allocation.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from cesshare._core import Community, InputError, ValidationError, load, synthetic

__all__ = ["Community", "InputError", "ValidationError", "load", "synthetic"]
__version__ = "0.1.0"
