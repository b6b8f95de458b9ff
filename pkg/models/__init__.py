# Models module for data structures
from .data_models import (
    GroupSpec, GroupElement, GeneratingBox, GenChar, TmSpec, WindowBox, CcFunction,
    LemmaCertificate, VerificationReport, MultiplicativeFunctional, RecoveredCharacter,
    Weight, StripRegion, ContainmentReport,
)

__all__ = [
    'GroupSpec', 'GroupElement', 'GeneratingBox', 'GenChar', 'TmSpec', 'WindowBox', 'CcFunction',
    'LemmaCertificate', 'VerificationReport', 'MultiplicativeFunctional', 'RecoveredCharacter',
    'Weight', 'StripRegion', 'ContainmentReport',
]
