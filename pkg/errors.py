"""
Errors Module
Exception hierarchy shared by the januarial engines and the command line.

Every exception carries the process exit code the CLI should use:
input problems exit with 2, failed certificates and identities with 1.
"""

from typing import Any, Dict, Optional


EXIT_OK = 0
EXIT_IDENTITY_FAILURE = 1
EXIT_INPUT_ERROR = 2


class JanuarialError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = EXIT_INPUT_ERROR


class PermutationError(JanuarialError, ValueError):
    """Invalid cycles, labels outside a domain, or mismatched domains."""


class ParseError(JanuarialError, ValueError):
    """Malformed cycle notation, point-set description or report file."""


class FieldError(JanuarialError, ValueError):
    """Non-prime modulus, inversion of zero, or mixed moduli."""


class OrderMismatchError(JanuarialError):
    """Generators do not have the claimed orders (2, k, l)."""


class NotJanuarialError(JanuarialError):
    """The action does not have exactly two xy-orbits of equal size."""


class DisconnectedDiagramError(JanuarialError):
    """The coset diagram has more than one connected component."""


class NoSolutionError(JanuarialError):
    """No primitive root or no parameter tuple exists for the request."""


class SearchExhaustedError(JanuarialError):
    """A bounded witness search finished without a certified candidate."""


class CertificationError(JanuarialError):
    """Generator orders failed to certify; points at a solver bug."""

    exit_code = EXIT_IDENTITY_FAILURE


class IdentityViolation(JanuarialError):
    """
    A genus identity that must hold did not.

    Attributes:
        check: Name of the failed identity (e.g. "lemma4").
        dump: Diagnostic values gathered when the failure was detected.
    """

    exit_code = EXIT_IDENTITY_FAILURE

    def __init__(self, check: str, message: str, dump: Optional[Dict[str, Any]] = None):
        super().__init__(f"{check}: {message}")
        self.check = check
        self.dump = dict(dump or {})
