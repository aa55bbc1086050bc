"""Exact computations on plane-curve germs: contact trees, magic matrices,
Jacobian division in the Lagrange basis and a topological multiple of the
Bernstein polynomial."""

from .bernstein import SPolynomial, bernstein_multiple, divisibility_check
from .bouquet import Bouquet, CharExponents, MultiplicityData, bouquet_from_char_exponents, \
    char_multiplicities, lagrange_coords, lagrange_recompose, milnor_number
from .division import f_squared_certificate, gr_nabla, nabla, solve_w, solve_wf, weight_constants
from .errors import (CurveMagicError, InputError, InsufficientPrecision, NotDistinguished,
                     NotReduced, NotThroughOrigin, NotTransverse, NotUltrametric, NotZeroSum,
                     UnsupportedExtension)
from .magic import magic_from_multiplicities, restrict_to_F, spectrum, spectrum_from_tree
from .puiseux import PuiseuxSeries, YPoly, newton_puiseux, product_of_linear
from .scalars import Cyclo, zeta
from .tree import Tree, build_tree, reconstruct_multiplicities

__version__ = "0.1.0"
