"""Dynamic membership, isomorphism and self-correction for Cayley tables."""
from .algebra import GroupContext, PGroupContext, reduce_generators
from .monoid_tree import MonoidTree
from .scheduler import Session, SessionConfig, new_session
from .subgroup_tree import SubgroupTree
from .tables import CayleyTable, Structure, validate_table

__version__ = "0.1.0"
