"""Small builders shared by the test modules."""

from crinvariants.exact import GaussianRational
from crinvariants.geometry import Hypersurface
from crinvariants.parser import parse_expression

I = GaussianRational(0, 1)

DANGELO = "-(w + conj(w)) + (z1^2 - w*z2)*conj(z1^2 - w*z2) + (z2*conj(z2))^2"
QUADRIC = "-(w + conj(w)) + z1*conj(z1)"
U_TERM = "-2*Re(w) + (z1*conj(z1))^2 + Im(w)^2*z1*conj(z1)"
CUBIC_2RE = "-2*Re(w) + 2*Re(z1^2*conj(z1))"
TWO_SQUARES = "-2*Re(w) + (z1*conj(z1))^2 + (z2*conj(z2))^2"
INFINITE_TYPE = "-2*Re(w) + z1*conj(z1) - (z2*conj(z2))^2"
DIFFERENT_KERNELS = "-2*Re(w) + 2*Re(z1^3*conj(z2))"
LEVI_FLAT = "-(w + conj(w))"
MIXED_QUARTIC = "-(w + conj(w)) + z1*conj(z1) + (z2*conj(z2))^2"


def model(text: str, n: int, name: str = "", order: int = 6) -> Hypersurface:
    return Hypersurface(parse_expression(text, n), name, order)
