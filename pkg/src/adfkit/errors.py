"""Exception hierarchy shared across the toolkit."""


class AdfkitError(Exception):
    """Base class for all toolkit errors."""


class RegistryError(AdfkitError):
    """Malformed registry file or violated registry invariant."""


class DataError(AdfkitError):
    """Invalid or empty input data (samples, groups, stats, shares)."""


class PolicyError(AdfkitError):
    """Unknown meta-attribute in a blocking policy, or registry mismatch."""


class FingerprintCollisionError(AdfkitError):
    """Two samples share a digest but not a canonical string."""


class SingleClassError(DataError):
    """Training data contains only one uniqueness class."""


class ChannelMismatchError(DataError):
    """A group's channel does not match the classifier's channel."""


class StorageError(AdfkitError):
    """Sample store could not be read or written."""
