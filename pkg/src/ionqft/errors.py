"""Exception hierarchy shared by the library, the service and the CLI.

Three failure families map onto the three nonzero CLI exit codes:

* ``ConfigError``        -> exit 2: malformed or out-of-range configuration.
* ``PhysicsDomainError`` -> exit 3: the request is outside the physical
  domain of validity (driving on resonance, mechanically unstable chain,
  singular propagator argument, inverted phonon band, ...).
* ``NumericsError``      -> exit 4: an iterative scheme failed to converge
  to its documented tolerance.
"""


class IonqftError(Exception):
    """Base class for all library errors."""


class ConfigError(IonqftError):
    """Invalid, missing or out-of-range configuration value."""


class PhysicsDomainError(IonqftError):
    """Physically ill-posed request (resonance, instability, singularity)."""


class NumericsError(IonqftError):
    """An iterative numerical scheme did not converge."""
