class ValidationError(ValueError):
    """Bad input: malformed file, unknown label, impossible setting."""
