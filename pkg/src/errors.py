"""
Error type shared by every lab module.

Each failure carries a stable ``code`` (for example ``"NonFiniteValue"``) so that
reports, the CLI and the HTTP layer can classify it without parsing messages.
"""

# Codes that signal a bad request rather than a failed computation.
CONFIG_ERROR_CODES = frozenset({"UnknownScenario", "BadParams", "NeedTwoWindows", "BadConfig"})


class LabError(ValueError):
    """Validation or numerical failure with a machine-readable code."""

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)

    @property
    def is_config_error(self) -> bool:
        return self.code in CONFIG_ERROR_CODES
