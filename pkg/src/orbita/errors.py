"""Exception hierarchy.

Errors fall into two families so that the command line front end can map
them onto exit codes: ``DomainError`` (input outside the region where a
formula is defined, exit code 2) and ``NumericalError`` (an algorithm did
not converge or a runtime self-check tripped, exit code 3).
"""


class OrbitaError(Exception):
    """Base class of all package errors."""


class DomainError(OrbitaError, ValueError):
    """The input lies outside the domain of the requested operation."""


class NumericalError(OrbitaError, ArithmeticError):
    """A numerical procedure failed or a self-check exceeded tolerance."""


# cartan-core
class DegenerateDirection(DomainError):
    """Vector is zero or (anti)parallel to -e3, where the Cartan matrix is singular."""


class DivergentKernel(DomainError):
    """An appendix kernel has a vanishing denominator."""


class AntipodalAngularMomentum(DomainError):
    """Angular momentum points against the chosen chart sign."""


# poisson-algebra
class ZeroAngularMomentum(DomainError):
    """The reduced bracket has 1/L3 terms and L3 vanishes."""


# orbit-geometry
class DegenerateOrbit(DomainError):
    """Weight vector violates p1 > p2 > p3."""


class OutOfDomain(DomainError):
    """Chart point violates one of the chart inequalities."""


class OffOrbit(DomainError):
    """State does not lie on the requested orbit."""


class ZeroR(DomainError):
    """Vibration amplitude R vanishes; the chart angles are undefined."""


class OutsideProjection(DomainError):
    """(L, Q) lies outside the projected orbit domain D."""


class LOutOfRange(DomainError):
    """Angular momentum outside [0, lambda + mu]."""


# elliptic
class ParameterOutOfRange(DomainError):
    """Elliptic parameter m outside the supported range."""


class CharacteristicPole(NumericalError):
    """Characteristic of the third-kind integral hits its pole on the path."""


class OutsideClassicalRegion(DomainError):
    """Point outside the oscillation interval of a quartic root tuple."""


# action-angle
class BoundaryState(DomainError):
    """State lies on an S ellipsoid where the angle variables degenerate."""


class NegativeSquare(NumericalError):
    """A squared body-frame component dipped below zero beyond tolerance."""


# quantize
class QuadratureFailure(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class NoStates(DomainError):
    """The branching multiplicity d vanishes for this angular momentum."""


class RootBracketFailure(NumericalError):
    """Bohr-Sommerfeld root could not be bracketed."""
