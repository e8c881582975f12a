from bttrep.config import BttConfig
from bttrep.factory import BttStudioFactory, create_studio
from bttrep.studio.studio import BttStudio

__all__ = ["BttStudio", "BttConfig", "BttStudioFactory", "create_studio"]
