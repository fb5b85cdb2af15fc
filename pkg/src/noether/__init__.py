"""Constructive rationality of K(G) for small p-groups G with an abelian normal
subgroup of index p: pc-group arithmetic, decomposition, monomial actions,
linearization, order-p^5 case replays and checkable certificates."""

from .pgroup import PGroup, Subgroup, subgroup_closure
from .presfile import parse_presentation, emit_presentation, presentation_digest

__all__ = ["PGroup", "Subgroup", "subgroup_closure", "parse_presentation",
           "emit_presentation", "presentation_digest"]
__version__ = "0.1.0"
