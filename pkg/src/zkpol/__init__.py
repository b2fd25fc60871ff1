"""Zero-knowledge proof-of-location statement library and protocol simulator.

Subpackages:
    field      prime-field arithmetic and the signed embedding
    circuit    visibility-tagged constraint system builder / checker
    gadgets    reusable circuit fragments (comparison, sqrt, hash, geometry)
    poseidon   Poseidon-style permutation parameters
    localcalc  prover-local helper computations and plaintext oracles
    statements the EV-subsidy and highway-tax proof statements
    protocol   Witness / Prover / Verifier session model with signatures
    appio      JSON formats, fixture generation, corridor triangulation
    cli        command-line driver
"""

from .field import FieldElement, FieldParams
from .circuit import ConstraintSystem, Domain, SatisfactionReport, Wire

__version__ = "0.1.0"

__all__ = [
    "FieldElement",
    "FieldParams",
    "ConstraintSystem",
    "Domain",
    "SatisfactionReport",
    "Wire",
    "__version__",
]
