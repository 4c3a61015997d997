from .app import ServiceConfig, create_app
from .schemas import CollectPayload, CollectResponse
from .storage import SampleStore

__all__ = ["ServiceConfig", "create_app", "CollectPayload", "CollectResponse", "SampleStore"]
