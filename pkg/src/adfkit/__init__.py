"""adfkit: device fingerprinting measurement and countermeasure toolkit."""
from .errors import AdfkitError
from .fingerprint import (
    DeviceConfig,
    FingerprintGroup,
    Sample,
    apply_blocking,
    build_fingerprint_dataset,
    canonical_string,
    filter_raw,
    make_fingerprint,
)
from .registry import AttributeRegistry, AttributeSpec, load_registry, scoped_attributes

__version__ = "0.1.0"

__all__ = [
    "AdfkitError",
    "AttributeRegistry",
    "AttributeSpec",
    "DeviceConfig",
    "FingerprintGroup",
    "Sample",
    "apply_blocking",
    "build_fingerprint_dataset",
    "canonical_string",
    "filter_raw",
    "load_registry",
    "make_fingerprint",
    "scoped_attributes",
    "__version__",
]
