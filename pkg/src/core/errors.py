"""
LinkSched - Errors Module
Exception and warning types shared by all modules
"""


class LinkSchedError ( Exception ) :
    """Base class for every error raised by LinkSched"""


class ValidationError ( LinkSchedError, ValueError ) :
    """Invalid input: shape, symmetry, range or config value"""


class DomainError ( ValidationError ) :
    """Input outside the domain of a matrix function (e.g. log of a non-SPD matrix)"""


class NumericalError ( LinkSchedError, ArithmeticError ) :
    """Iterative numerical routine did not converge"""


class CapacityError ( LinkSchedError ) :
    """Problem size beyond what an exact routine is allowed to enumerate"""


class StorageError ( LinkSchedError, OSError ) :
    """Reading or writing a file failed"""

    def __init__ ( self, path: str, message: str ) :
        super().__init__( f"{path}: {message}" )
        self.path = path


class ConvergenceWarning ( UserWarning ) :
    """Solver stopped at its iteration cap before meeting its tolerance"""
