__version__ = "0.1.0"

from .config import settings
from .errors import ParseError, SequentLabError
from .formula_core import Formula, Language, Term
from .grammar import format_derivation, parse_derivation, parse_formula, parse_sequent
from .lab_logger import LabLogger
from .proof_search import SearchBudget, omega_membership, search_cutfree
from .report import LabReport
from .sequent_kernel import LI, LIP, LIT, CalculusId, Derivation, Sequent, check
