"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid parameters or configuration (CLI exit code 2)."""


class CodewordFormatError(ValueError):
    """Malformed codeword/observation container (CLI exit code 3)."""
