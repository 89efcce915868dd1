import math


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


HALF_PI = math.pi / 2
# decimal inputs such as 1.5707963268 overshoot pi/2 in the 12th digit
UPPER_SLACK = 1e-9


def check_theta(theta, upper=HALF_PI):
    if not (math.isfinite(theta) and 0.0 < theta <= upper + UPPER_SLACK):
        raise DomainError(f"theta must lie in (0, {upper:.9f}], got {theta!r}")
    return min(float(theta), upper)


def check_open_unit(name, value):
    if not (math.isfinite(value) and 0.0 < value < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def check_tail(name, value):
    # tail probabilities: (0, 1]; value 1 means "no confidence requested"
    if not (math.isfinite(value) and 0.0 < value <= 1.0):
        raise DomainError(f"{name} must lie in (0, 1], got {value!r}")
    return float(value)


def check_bias(eps_a):
    if not (math.isfinite(eps_a) and 0.0 <= eps_a <= 0.5):
        raise DomainError(f"bias must lie in [0, 1/2], got {eps_a!r}")
    return float(eps_a)


def check_count(name, value, minimum=1):
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
