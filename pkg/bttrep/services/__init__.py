from .counting.counting import CountingService
from .synthesis.synthesis import SynthesisService

__all__ = ["CountingService", "SynthesisService"]
