"""HTTP service layer: pydantic schemas, handlers, and the FastAPI app."""

from . import handlers, schemas

__all__ = ["handlers", "schemas"]
