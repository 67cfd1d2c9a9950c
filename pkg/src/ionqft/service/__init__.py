"""HTTP service surface: pydantic config models and the FastAPI app factory."""

from .app import create_app
from .models import DEFAULT_CONFIG_DICT, RunConfig

__all__ = ["DEFAULT_CONFIG_DICT", "RunConfig", "create_app"]
