from .counting import CountingOptions, CountingService, CountReport, RepSpec

__all__ = ["CountingService", "CountingOptions", "CountReport", "RepSpec"]
