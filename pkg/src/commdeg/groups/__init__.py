"""Group models with canonical element payloads."""
from .base import (
    EXCEEDS_CAP,
    INFINITE,
    GroupError,
    GroupModel,
    HomomorphismError,
    InfiniteGroupError,
    MalformedSpecError,
    OrderResult,
    PayloadError,
    free_reduce,
    invert_word,
    parse_generator_word,
)
from .coords import CongruenceQuotient, FreeAbelian, Heisenberg, InfiniteDihedral, Semidirect
from .factory import KINDS, homomorphism_from_images, inv, make_group, mul, order_of, quotient
from .finite import (
    PermutationGroup,
    TableGroup,
    center,
    cyclic,
    dihedral,
    direct_product,
    named_group,
    quaternion,
    quotient_by_normal,
    subgroup_closure,
    symmetric,
    table_from_model,
)
from .homomorphism import Homomorphism, parity_homomorphism
from .rewriting import (
    ConfluenceReport,
    CriticalPair,
    NonConfluentError,
    RewritingGroup,
    RewritingSystemSpec,
    ShortlexOrientationError,
    check_confluence,
    parse_rewriting_system,
)
from .words import FreeGroup, FreeProduct

__all__ = [name for name in dir() if not name.startswith("_")]
