from .degrees import Bidegree, Key, key_add, key_sub
from .presentation import (
    GeneratorSymbol, ModuleGenerator, PresentationError, PresentedAlgebra, PresentedModule,
    monomial_basis,
)

__all__ = [
    "Bidegree", "Key", "key_add", "key_sub", "GeneratorSymbol", "ModuleGenerator",
    "PresentationError", "PresentedAlgebra", "PresentedModule", "monomial_basis",
]
