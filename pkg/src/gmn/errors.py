"""Exception types shared across the package."""


class SizeError(ValueError):
    """Raised when a state would exceed the supported register size, or sizes disagree."""


class PostselectionError(ValueError):
    """Raised when a projection leaves no surviving amplitude."""


class DomainError(ValueError):
    """Raised when a parameter falls outside its allowed range."""
