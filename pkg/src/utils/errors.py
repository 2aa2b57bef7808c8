"""
Exceptions raised across Gadgetdict

Every failure the library signals derives from GadgetdictError so callers
(and the bench CLI) can catch one type at the outermost layer.
"""


class GadgetdictError(Exception):
    """Base class for all Gadgetdict errors"""


class CapacityExhausted(GadgetdictError):
    """Page allocation would exceed the configured page budget"""


class InvalidPage(GadgetdictError, IndexError):
    """A PageId that was never allocated (or was freed) was accessed"""


class SizeMismatch(GadgetdictError, ValueError):
    """A page image does not have exactly b bits"""


class BadParameters(GadgetdictError, ValueError):
    """Configuration violates a structural bound (powers of two, lambda range, ...)"""


class NeedsRebuild(GadgetdictError):
    """A gadget would exceed its capacity; the owner must rebuild it"""


class DictionaryFull(GadgetdictError):
    """The live key count exceeds n_max; rebuild with a larger n_max"""


class PageFileError(GadgetdictError):
    """A page file or manifest is malformed or does not match its header"""
