"""Exact sums-of-norms decompositions of integral hermitian forms over Q and the
nine imaginary quadratic fields of class number one."""

__version__ = "0.1.0"

from .number_field import (  # noqa: E402
    CLASS_NUMBER_ONE,
    AlgebraicBound,
    FieldElement,
    FieldSpec,
    canonical_associate,
    ideal_gcd,
    norm,
    round_to_ring,
)
from .linalg import (  # noqa: E402
    GradedSlice,
    HermitianForm,
    Matrix,
    cholesky_upper,
    extend_to_unimodular,
    is_positive_semidefinite,
    nilpotent_exp,
)
from .reduction import ReducedForm, balance, balanced_hkz, shortest_vector, weak_reduce  # noqa: E402
from .bounds import BoundsProfile, alpha, certify_constants, maclaurin_c, sigma_n  # noqa: E402
from .representation import Representation, verify  # noqa: E402
from .sos_core import (  # noqa: E402
    BlockDecomposition,
    assemble_lemma51,
    four_squares,
    pset_split,
    represent_binary_block,
    two_by_two_T,
)
from .oracle import Certificate, SearchBudget, prove_not_representable, search_representation  # noqa: E402
from .decomposer import (  # noqa: E402
    BelowThreshold,
    BlockFailure,
    Caps,
    Success,
    compress_representation,
    decompose,
    scale_form,
)
