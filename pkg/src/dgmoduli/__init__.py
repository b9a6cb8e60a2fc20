"""Exact computations with finite-dimensional algebras over F_p and Q: perfect
complexes and their cell structures, smoothness and saturation, Tor amplitude over
the integers, and finite-field points of moduli of complexes over quiver algebras."""

from .errors import (BoundExceeded, CoefficientMismatch, DGModuliError, PreconditionError,
                     Undetermined, UnsupportedCharacteristic, ValidationError)
from .exact_linalg import GF, QQ, Field
from .fdalgebra import (FinDimAlgebra, Quiver, TableAlgebra, TensorAlgebra, dual_numbers,
                        enveloping_algebra, matrix_algebra, path_algebra, product_of_fields)
from .modules import ModuleRep, hom_space, is_isomorphic, simples_and_projectives
from .complexes import (ChainMap, Complex, aut_order, cone, end_algebra, ext_dims, is_quasi_iso,
                        projective_replacement, rhom)
from .zcomplex import IntChainMap, IntComplex
from .perfection import (AmplitudeBracket, amplitude_calculus_check, cell_structure, is_perfect,
                         peel, support_primes, tor_amplitude_Z, truncation_step, verify_cells)
from .dgcat_props import (bimodule_is_equivalence, certify, diagonal_bimodule, hochschild, is_proper,
                          is_saturated, is_smooth, morita_data, morita_transport)
from .moduli import (ClassTable, ModuliPoint, NuBound, classify_rigidity, enumerate_classes,
                     point_invariants, stacky_count)

__version__ = "0.1.0"
