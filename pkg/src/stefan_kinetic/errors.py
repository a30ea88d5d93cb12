"""Exception types raised across the package."""


class StefanError(Exception):
    """Base class for all package errors."""


class ConfigError(StefanError):
    """Invalid or incomplete configuration (mapped to CLI exit code 2)."""


class MissingKey(ConfigError):
    def __init__(self, key):
        super().__init__(f"missing required key: {key!r}")
        self.key = key


class NonPositiveParameter(ConfigError):
    def __init__(self, key, value):
        super().__init__(f"parameter {key!r} must be positive, got {value!r}")
        self.key = key
        self.value = value


class UnknownKey(ConfigError):
    def __init__(self, key):
        super().__init__(f"unknown configuration key: {key!r}")
        self.key = key


class BoundaryMismatch(StefanError):
    pass


class UnresolvableWidth(StefanError):
    pass


class SignConditionViolated(StefanError):
    def __init__(self, theta, value):
        super().__init__(f"sign condition violated at theta={theta!r} (v={value!r})")
        self.theta = theta
        self.value = value


class NumericFailure(StefanError):
    """Failure during time stepping (mapped to CLI exit code 3)."""


class PicardDivergence(NumericFailure):
    def __init__(self, step, residual):
        super().__init__(
            f"Picard iteration did not converge at step {step} (residual {residual:.3e})"
        )
        self.step = step
        self.residual = residual


class NonFiniteState(NumericFailure):
    def __init__(self, step):
        super().__init__(f"non-finite state encountered at step {step}")
        self.step = step


class InvalidInitialInterface(StefanError):
    pass


class NoBracket(StefanError):
    pass


class NonConverging(StefanError):
    pass


class UnknownScenario(ConfigError):
    pass


class NotRankOne(StefanError):
    def __init__(self, sigma2):
        super().__init__(f"matrix minus identity is not rank one (sigma_2={sigma2:.3e})")
        self.sigma2 = sigma2


class IncompatibleSpec(StefanError):
    def __init__(self, sigma2):
        super().__init__(f"laminate is not rank-one compatible (sigma_2={sigma2:.3e})")
        self.sigma2 = sigma2


class LambdaOutOfRange(StefanError):
    pass


class MissingArtifacts(StefanError):
    pass
