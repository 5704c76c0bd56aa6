"""Exact-arithmetic toolkit for small cancellation presentations.

Piece tables and C'(lambda) verdicts, Dehn's algorithm, materialized
Cayley regions with contour tracing, the contour-weight arrays xi / eta /
Phi with their drift certificates, free-product combination, and the
finite-alphabet rewriting. Everything numeric is a Fraction; floats only
appear in report serialization.
"""

from .arrays import (ArrayParams, StepFunction, chain_weights,
                     contours_common, contours_on_geodesic, eta, psi_eval,
                     xi, xi_along)
from .cayley import (ArcIntersection, Contour, GeodesicPath, Region,
                     build_region, check_arc_geodesics, dot_dump, intersect,
                     trace_contours)
from .errors import (EmptyRelator, InvariantViolation, NotNormalForm,
                     NotReduced, NotSmallCancellation, NotSymmetrized,
                     OutOfRegion, ParseError, ResourceLimit, ScArraysError,
                     Skipped, ValencyExceeded)
from .kernels import COMPILED, IMPL
from .presentation import (PieceReport, Presentation,
                           format_presentation_text, generate_family,
                           normalize_star, parse_presentation_text,
                           piece_table)
from .properarray import (EmbeddingSpec, FactorArray, LetterGraph,
                          PhiTildeFactor, ProperArrayParams,
                          WordLengthFactor, check_combined_symmetry,
                          combine_free_product,
                          embed_into_finitely_generated,
                          exponent_inequality_holds, letter_graph,
                          minimal_exponent, patched_mass_vector, phi,
                          phi_tilde_stats, properness_census)
from .sparse import SparseVector
from .wordproblem import (GreendlingerHit, dehn_reduce,
                          find_greendlinger_subword, is_identity,
                          relevant_relator_bound)
from .words import (cyclic_reduce, format_word, inverse, parse_word, reduce,
                    reduce as free_reduce)

__version__ = "0.1.0"
