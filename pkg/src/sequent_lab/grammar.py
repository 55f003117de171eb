"""Text formats for formulas, abstracts, sequents and derivations, parsed with lark.

Formulas: `p(t1, t2)`, `t = u`, `X(t)`, `bot`, `&` binds tighter than `|`, which binds tighter than
`->` (right associative); `all x.`, `ex x.`, `All X.`, `Ex X.` extend as far right as possible.
Sequents: `φ1, φ2 |- ψ` or `φ1 |-`. Derivations: `(Rule {key: value; ...} [sequent] premise ...)`.
"""
from functools import lru_cache
from typing import Any, Dict, List, Optional, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from sequent_lab.errors import ArityMismatch, ParseError, SequentLabError
from sequent_lab.formula_core import (
    BOT,
    DEFAULT_LANGUAGE,
    Abstract,
    Atom,
    Binary,
    Fn,
    Formula,
    Language,
    SetAtom,
    Term,
    Var,
    abstract,
    format_term,
    quantify,
)
from sequent_lab.sequent_kernel import RULE_ARITY, Derivation, Sequent

FORMULA_GRAMMAR = r"""
formula: imp_q

?imp_q: disj "->" imp_q     -> imp
      | disj_q
?disj_q: disj "|" conj_q    -> or_
       | conj_q
?conj_q: conj "&" unary_q   -> and_
       | unary_q
?unary_q: unary
        | quant

?disj: disj "|" conj        -> or_
     | conj
?conj: conj "&" unary       -> and_
     | unary
?unary: atom
      | "bot"               -> bot
      | "(" imp_q ")"

quant: QUANT1 LNAME "." imp_q   -> quant1
     | QUANT2 UNAME "." imp_q   -> quant2

?atom: LNAME "(" term_list ")"  -> pred_atom
     | LNAME                    -> prop_atom
     | UNAME "(" term ")"       -> set_atom
     | term "=" term            -> eq_atom

term_list: term ("," term)*
?term: LNAME "(" term_list ")"  -> app
     | LNAME                    -> name
     | NUMBER                   -> numeral
     | "*"                      -> star

abstraction: "\\" LNAME "." imp_q
sequent: [formula_list] "|-" [imp_q]
formula_list: imp_q ("," imp_q)*

derivation: "(" RULE [witnesses] "[" sequent "]" derivation* ")"
witnesses: "{" [witness (";" witness)* [";"]] "}"
witness: "main" ":" imp_q                   -> w_main
       | "cut" ":" imp_q                    -> w_main
       | "term" ":" term                    -> w_term
       | "abstract" ":" abstraction         -> w_abstract
       | "eigen" ":" (LNAME | UNAME)        -> w_eigen
       | "index" ":" NUMBER                 -> w_index


QUANT1.2: /(all|ex)(?![A-Za-z0-9_])/
QUANT2.2: /(All|Ex)(?![A-Za-z0-9_])/
LNAME: /(?!(all|ex|bot|main|cut|term|abstract|eigen|index)(?![A-Za-z0-9_]))[a-z][A-Za-z0-9_]*/
UNAME: /(?!(All|Ex)(?![A-Za-z0-9_]))[A-Z][A-Za-z0-9_]*/
RULE.3: /(Id|Cut|BotL|BotR|AndL|AndR|OrL|OrR|ImpL|ImpR|AllL|AllR|ExL|ExR|All2L|All2R|Ex2L|Ex2R)(?=\s|\{|\[)/
NUMBER: /[0-9]+/

COMMENT: /#[^\n]*/
%import common.WS
%ignore WS
%ignore COMMENT
"""


@lru_cache(maxsize=None)
def _parser() -> Lark:
    return Lark(
        FORMULA_GRAMMAR,
        start=["formula", "term", "abstraction", "sequent", "derivation"],
        parser="earley",
        maybe_placeholders=True,
        propagate_positions=False,
    )


@v_args(inline=True)
class _ToSyntax(Transformer):
    def __init__(self, language: Language) -> None:
        super().__init__()
        self.language = language

    # terms
    def term_list(self, *terms: Term) -> List[Term]:
        return list(terms)

    def app(self, name: Token, args: List[Term]) -> Term:
        self.language.check_function(str(name), len(args))
        return Fn(str(name), tuple(args))

    def name(self, token: Token) -> Term:
        text = str(token)
        if self.language.is_constant(text):
            return Fn(text)
        return Var(text)

    def numeral(self, token: Token) -> Term:
        return Fn(str(token))

    def star(self) -> Term:
        return Fn("*")

    # atoms
    def pred_atom(self, name: Token, args: List[Term]) -> Formula:
        self.language.check_predicate(str(name), len(args))
        return Atom(str(name), tuple(args))

    def prop_atom(self, name: Token) -> Formula:
        self.language.check_predicate(str(name), 0)
        return Atom(str(name), ())

    def set_atom(self, name: Token, arg: Term) -> Formula:
        return SetAtom(str(name), arg)

    def eq_atom(self, left: Term, right: Term) -> Formula:
        return Atom("=", (left, right))

    def bot(self) -> Formula:
        return BOT

    # connectives
    def imp(self, left: Formula, right: Formula) -> Formula:
        return Binary("->", left, right)

    def or_(self, left: Formula, right: Formula) -> Formula:
        return Binary("|", left, right)

    def and_(self, left: Formula, right: Formula) -> Formula:
        return Binary("&", left, right)

    def quant1(self, kind: Token, name: Token, body: Formula) -> Formula:
        if self.language.is_constant(str(name)):
            raise ParseError(f"Cannot bind the constant {name}", name.line, name.column)
        return quantify(str(kind), str(name), body)

    def quant2(self, kind: Token, name: Token, body: Formula) -> Formula:
        return quantify(str(kind), str(name), body)

    def abstraction(self, name: Token, body: Formula) -> Abstract:
        if self.language.is_constant(str(name)):
            raise ParseError(f"Cannot bind the constant {name}", name.line, name.column)
        return abstract(str(name), body)

    # sequents and derivations
    def formula_list(self, *formulas: Formula) -> List[Formula]:
        return list(formulas)

    def formula(self, f: Formula) -> Formula:
        return f

    def sequent(self, antecedent: Optional[List[Formula]], succedent: Optional[Formula]) -> Sequent:
        return Sequent.of(antecedent or [], succedent)

    def w_main(self, value: Formula) -> Any:
        return ("main", value)

    def w_term(self, value: Term) -> Any:
        return ("term", value)

    def w_abstract(self, value: Abstract) -> Any:
        return ("abstract", value)

    def w_eigen(self, value: Token) -> Any:
        return ("eigen", str(value))

    def w_index(self, value: Token) -> Any:
        return ("index", int(str(value)))

    def witnesses(self, *items: Any) -> Dict[str, Any]:
        return dict(item for item in items if item is not None)

    def derivation(self, rule: Token, witnesses: Optional[Dict[str, Any]], conclusion: Sequent, *premises) -> Derivation:
        return Derivation(
            rule=str(rule),
            conclusion=conclusion,
            premises=tuple(premises),
            **(witnesses or {}),
        )


def _parse(text: str, start: str, language: Optional[Language]) -> Any:
    try:
        tree = _parser().parse(text, start=start)
        return _ToSyntax(language or DEFAULT_LANGUAGE).transform(tree)
    except UnexpectedInput as e:
        line = getattr(e, "line", None)
        column = getattr(e, "column", None)
        if line is not None and line < 0:
            line, column = None, None
        raise ParseError(f"Cannot parse {start}: {e.__class__.__name__}", line, column) from e
    except VisitError as e:
        if isinstance(e.orig_exc, SequentLabError):
            raise e.orig_exc from e
        raise ParseError(f"Cannot parse {start}: {e.orig_exc}") from e


def parse_formula(text: str, language: Optional[Language] = None) -> Formula:
    """
    Parse a formula; lowercase names are constants when the language declares them with arity 0,
    term variables otherwise.

    Parameters:
        text: Formula text, e.g. `all x. p(x) -> ex y. q(x, y)`
        language: Declared symbols, the default language has the constants `c`, `0`, `*` and `s`

    Returns:
        formula: The canonical formula
    """
    return _parse(text, "formula", language)


def parse_term(text: str, language: Optional[Language] = None) -> Term:
    return _parse(text, "term", language)


def parse_abstract(text: str, language: Optional[Language] = None) -> Abstract:
    return _parse(text, "abstraction", language)


def parse_sequent(text: str, language: Optional[Language] = None) -> Sequent:
    return _parse(text, "sequent", language)


def parse_formulas(text: str, language: Optional[Language] = None) -> List[Formula]:
    """Parse a `.fml` document: one formula per non-empty line, `#` starts a comment"""
    formulas = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            formulas.append(parse_formula(stripped, language))
        except ParseError as e:
            raise ParseError(f"Cannot parse formula on line {number}", number, e.column or 1) from e
    return formulas


def parse_derivation(text: str, language: Optional[Language] = None) -> Derivation:
    """Parse a `.sqp` derivation document (one root node)"""
    derivation = _parse(text, "derivation", language)
    for node in derivation.nodes():
        if node.rule not in RULE_ARITY:
            raise ParseError(f"Unknown rule {node.rule}")
    return derivation


def format_sequent(s: Sequent) -> str:
    return str(s)


def _format_witnesses(d: Derivation) -> str:
    items = []
    if d.main is not None:
        items.append(("cut" if d.rule == "Cut" else "main", d.main.text))
    if d.term is not None:
        items.append(("term", format_term(d.term)))
    if d.abstract is not None:
        items.append(("abstract", str(d.abstract)))
    if d.eigen is not None:
        items.append(("eigen", d.eigen))
    if d.index is not None:
        items.append(("index", str(d.index)))
    return "{" + "; ".join(f"{k}: {v}" for k, v in items) + "}"


def format_derivation(d: Derivation, indent: int = 0) -> str:
    """Serialize a derivation, one node per line, premises indented below their conclusion"""
    pad = "  " * indent
    head = f"{pad}({d.rule} {_format_witnesses(d)} [{d.conclusion}]"
    if not d.premises:
        return head + ")"
    body = "\n".join(format_derivation(p, indent + 1) for p in d.premises)
    return f"{head}\n{body})"


Parsed = Union[Formula, Term, Abstract, Sequent, Derivation]

__all__ = [
    "ArityMismatch",
    "format_derivation",
    "format_sequent",
    "parse_abstract",
    "parse_derivation",
    "parse_formula",
    "parse_formulas",
    "parse_sequent",
    "parse_term",
]
