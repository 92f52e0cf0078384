"""Lock certificates for corner chains: boost angles, k-tensor constants and
pointwise verification of the dominant-energy jump condition."""

from .chain_engine import (
    CornerChain,
    InterfaceData,
    LockCertificate,
    build_certificate,
    certify,
    check_hypotheses,
    defect_ledger,
    effective_bounds,
    effective_upper,
    k_constants,
    verify_certificate,
)
from .lock_core import (
    Boost,
    LemmaInput,
    LorentzVec,
    boost_apply,
    dec_jump_holds,
    jump_vector,
    lock_angle,
    lorentz_norm_sq,
    verify_interface,
    xi,
)

__version__ = "0.1.0"

__all__ = [
    "Boost",
    "CornerChain",
    "InterfaceData",
    "LemmaInput",
    "LockCertificate",
    "LorentzVec",
    "boost_apply",
    "build_certificate",
    "certify",
    "check_hypotheses",
    "dec_jump_holds",
    "defect_ledger",
    "effective_bounds",
    "effective_upper",
    "jump_vector",
    "k_constants",
    "lock_angle",
    "lorentz_norm_sq",
    "verify_certificate",
    "verify_interface",
    "xi",
]
