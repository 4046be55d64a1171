"""meritrank: value-driven assessment platform.

Achievements live in a typed resource graph; indicators extract quality
measures from them; personal and collective value systems weigh those
indicators; the ranking engine turns both into deterministic scored
rankings; the league system runs the promotion/relegation model on top.
Served over HTTP (meritrank.service) and a CLI (meritrank.cli).
"""

from .platform import Platform, apply_events
from .state import PlatformState

__all__ = ["Platform", "PlatformState", "apply_events"]
__version__ = "0.1.0"
