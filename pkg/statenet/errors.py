"""
StateNet-PH error hierarchy
Every service module raises a subclass of StateNetError so the CLI can
tell compute failures apart from validation failures.
"""
from typing import Optional


class StateNetError(Exception):
    """Base class for all pipeline errors"""

    @property
    def details(self) -> Optional[dict]:
        """Structured context for the error summary, if the error carries any"""
        return None
