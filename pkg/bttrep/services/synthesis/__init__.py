from .synthesis import SynthesisService

__all__ = ["SynthesisService"]
