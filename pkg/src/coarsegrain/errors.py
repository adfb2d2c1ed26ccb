"""Exception types shared across the package."""


class DimensionError(ValueError):
    pass


class DomainError(ValueError):
    pass


class UnsupportedError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


class MalformedGenerator(ValueError):
    pass


class ConfigError(ValueError):
    """Raised with every violated constraint listed in the message."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FormatError(ValueError):
    pass
