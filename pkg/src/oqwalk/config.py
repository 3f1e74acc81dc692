"""Shared tolerance configuration.

Every numerical gate in the package reads its threshold from a ``Tolerances``
instance so callers can tighten or relax the whole stack coherently.  The
defaults are: positivity 1e-10, relative residuals 1e-9, trace checks 1e-12.
"""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    positivity: float = 1e-10
    residual: float = 1e-9
    trace: float = 1e-12

    def with_overrides(self, **kwargs: float) -> "Tolerances":
        """Return a copy with the given fields replaced (None values ignored)."""
        clean = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **clean) if clean else self


DEFAULT_TOLERANCES = Tolerances()
