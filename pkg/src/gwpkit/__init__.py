"""Generalized word problem toolkit: Stallings cores, pushdown deciders and
extended Dehn algorithms, with brute-force references to check them against."""

from .errors import GwpError
from .words import GeneratorAlphabet, SubgroupSpec, free_reduce, make_oracle
from .graphs import XGraph, stallings_fold, core_membership, gib_check
from .eda import Eda, Rule, reduce_stream, reduce_batch, two_family_eda
from .pda import GwpPda, SchreierRewriter, gwp_virtually_free
from .problems import Problem, load_fixture

__version__ = "0.1.0"

__all__ = [
    "GwpError", "GeneratorAlphabet", "SubgroupSpec", "free_reduce", "make_oracle", "XGraph", "stallings_fold",
    "core_membership", "gib_check", "Eda", "Rule", "reduce_stream", "reduce_batch", "two_family_eda", "GwpPda",
    "SchreierRewriter", "gwp_virtually_free", "Problem", "load_fixture",
]
