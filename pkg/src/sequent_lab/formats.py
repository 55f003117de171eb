"""Readers for the lab's input documents.

`.pol` holds one polarity, poset, algebra or frame. A `poset K` document has the layout of
`algebra K` and skips the lattice checks:

    polarity 3 2          algebra 3              frame 2 2
    W a b c               elements 0 1/2 1       <polarity rows>
    W' p q                1 1 1                  unit e
    1 0                   0 1 1                  compose
    0 1                   0 0 1                  <|W| rows of |W| labels>
    1 1                                          residual
                                                 <|W| rows of |W'| labels>

`.mdl` describes a full structure: `algebra chain 0 1/2 1`, `algebra boolean 2` or
`algebra file other.pol`, then `functions * s/1`, `depth 1` and predicate rows `p m1 ... mk -> h`.
`.fml` holds one formula per line. Every reader reports errors with their line and column.
"""
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from sequent_lab.errors import ParseError
from sequent_lab.formula_core import Formula, Language, Term
from sequent_lab.grammar import parse_formulas, parse_term
from sequent_lab.lattice_lab import (
    FiniteHeytingAlgebra,
    FinitePoset,
    HeytingFrame,
    Label,
    Polarity,
    as_heyting,
    boolean_algebra,
    chain_algebra,
    label_text,
)
from sequent_lab.semantics import Structure, closed_terms

PolDocument = Union[Polarity, FinitePoset, HeytingFrame]

_NUMBER = re.compile(r"^-?[0-9]+(/[0-9]+)?$")


class _Lines:
    """Non-empty lines without `#` comments, keeping their line numbers"""

    def __init__(self, text: str) -> None:
        self.items: List[Tuple[int, str]] = []
        for number, line in enumerate(text.splitlines(), start=1):
            content = line.split("#", 1)[0].rstrip()
            if content.strip():
                self.items.append((number, content))
        self.position = 0
        self.last_line = len(text.splitlines()) or 1

    def peek(self) -> Optional[Tuple[int, str]]:
        return self.items[self.position] if self.position < len(self.items) else None

    def take(self, what: str) -> Tuple[int, List[Tuple[int, str]]]:
        """The next line as (line number, [(column, token)])"""
        item = self.peek()
        if item is None:
            raise ParseError(f"Unexpected end of document, expected {what}", self.last_line, 1)
        self.position += 1
        number, content = item
        return number, [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", content)]

    def done(self) -> None:
        item = self.peek()
        if item is not None:
            number, content = item
            raise ParseError("Unexpected content after the document", number, len(content) - len(content.lstrip()) + 1)


def parse_label(token: str) -> Label:
    """Integers and fractions become exact `Fraction` labels, anything else stays a string"""
    return Fraction(token) if _NUMBER.match(token) else token


def _count(number: int, column: int, token: str) -> int:
    if not token.isdigit():
        raise ParseError(f"Expected a size, got {token!r}", number, column)
    return int(token)


def _bits(number: int, tokens: List[Tuple[int, str]], width: int) -> Tuple[bool, ...]:
    if len(tokens) != width:
        raise ParseError(f"Expected {width} entries of 0/1, got {len(tokens)}", number, tokens[0][0] if tokens else 1)
    row = []
    for column, token in tokens:
        if token not in ("0", "1"):
            raise ParseError(f"Expected 0 or 1, got {token!r}", number, column)
        row.append(token == "1")
    return tuple(row)


def _labels(lines: _Lines, keyword: str, size: int, default: List[Label]) -> Tuple[Label, ...]:
    item = lines.peek()
    if item is None or item[1].split()[0] != keyword:
        return tuple(default)
    number, tokens = lines.take(keyword)
    labels = [parse_label(token) for _, token in tokens[1:]]
    if len(labels) != size:
        raise ParseError(f"Expected {size} labels after {keyword}, got {len(labels)}", number, tokens[0][0])
    return tuple(labels)


def _matrix(lines: _Lines, rows: int, width: int) -> Tuple[Tuple[bool, ...], ...]:
    matrix = []
    for _ in range(rows):
        number, tokens = lines.take(f"a row of {width} entries")
        matrix.append(_bits(number, tokens, width))
    return tuple(matrix)


def _table(
    lines: _Lines, keyword: str, row_labels: Tuple[Label, ...], col_labels: Tuple[Label, ...], values: Tuple[Label, ...]
) -> Dict[Tuple[Label, Label], Label]:
    number, tokens = lines.take(keyword)
    if tokens[0][1] != keyword or len(tokens) != 1:
        raise ParseError(f"Expected the {keyword} table", number, tokens[0][0])
    by_text = {label_text(v): v for v in values}
    table = {}
    for x in row_labels:
        number, tokens = lines.take(f"a row of the {keyword} table")
        if len(tokens) != len(col_labels):
            raise ParseError(f"Expected {len(col_labels)} entries, got {len(tokens)}", number, tokens[0][0])
        for (column, token), z in zip(tokens, col_labels):
            if token not in by_text:
                raise ParseError(f"Unknown label {token!r} in the {keyword} table", number, column)
            table[(x, z)] = by_text[token]
    return table


def _read_polarity(lines: _Lines, number: int, tokens: List[Tuple[int, str]]) -> Polarity:
    if len(tokens) != 3:
        raise ParseError("Expected `polarity |W| |W'|`", number, tokens[0][0])
    m = _count(number, tokens[1][0], tokens[1][1])
    n = _count(number, tokens[2][0], tokens[2][1])
    w = _labels(lines, "W", m, [f"w{i}" for i in range(m)])
    w_prime = _labels(lines, "W'", n, [f"v{j}" for j in range(n)])
    return Polarity(w, w_prime, _matrix(lines, m, n))


def _read_poset(lines: _Lines, number: int, tokens: List[Tuple[int, str]]) -> FinitePoset:
    if len(tokens) != 2:
        raise ParseError(f"Expected `{tokens[0][1]} <size>`", number, tokens[0][0])
    size = _count(number, tokens[1][0], tokens[1][1])
    elements = _labels(lines, "elements", size, [Fraction(i) for i in range(size)])
    return FinitePoset(elements, _matrix(lines, size, size))


def _read_algebra(lines: _Lines, number: int, tokens: List[Tuple[int, str]]) -> FiniteHeytingAlgebra:
    return as_heyting(_read_poset(lines, number, tokens))


def _read_frame(lines: _Lines, number: int, tokens: List[Tuple[int, str]]) -> HeytingFrame:
    polarity = _read_polarity(lines, number, tokens)
    unit_line, unit_tokens = lines.take("unit")
    if len(unit_tokens) != 2 or unit_tokens[0][1] != "unit":
        raise ParseError("Expected `unit <label>`", unit_line, unit_tokens[0][0])
    by_text = {label_text(x): x for x in polarity.w}
    if unit_tokens[1][1] not in by_text:
        raise ParseError(f"Unit {unit_tokens[1][1]!r} is not in W", unit_line, unit_tokens[1][0])
    compose = _table(lines, "compose", polarity.w, polarity.w, polarity.w)
    residual = _table(lines, "residual", polarity.w, polarity.w_prime, polarity.w_prime)
    return HeytingFrame(polarity, compose, by_text[unit_tokens[1][1]], residual)


def read_pol(text: str) -> PolDocument:
    """
    Read a `.pol` document.

    Parameters:
        text: Document text starting with a `polarity`, `poset`, `algebra` or `frame` header

    Returns:
        document: A Polarity, a FinitePoset, a FiniteHeytingAlgebra or a validated HeytingFrame
    """
    lines = _Lines(text)
    number, tokens = lines.take("a header")
    readers = {"polarity": _read_polarity, "poset": _read_poset, "algebra": _read_algebra, "frame": _read_frame}
    reader = readers.get(tokens[0][1])
    if reader is None:
        raise ParseError(f"Unknown header {tokens[0][1]!r}, expected polarity, poset, algebra or frame", number, tokens[0][0])
    document = reader(lines, number, tokens)
    lines.done()
    return document


def _algebra_reference(number: int, tokens: List[Tuple[int, str]], base: Optional[Path]) -> FiniteHeytingAlgebra:
    if len(tokens) < 2:
        raise ParseError("Expected `algebra chain|boolean|file ...`", number, tokens[0][0])
    kind, args = tokens[1][1], tokens[2:]
    if kind == "chain":
        return chain_algebra([parse_label(t) for _, t in args] or None)
    if kind == "boolean" and len(args) == 1:
        return boolean_algebra(_count(number, args[0][0], args[0][1]))
    if kind == "file" and len(args) == 1:
        path = Path(args[0][1])
        if base is not None and not path.is_absolute():
            path = base / path
        document = read_pol(path.read_text(encoding="utf-8"))
        if not isinstance(document, FiniteHeytingAlgebra):
            raise ParseError(f"{path} does not hold an algebra", number, args[0][0])
        return document
    raise ParseError(f"Unknown algebra reference {kind!r}", number, tokens[1][0])


def _function_symbols(number: int, tokens: List[Tuple[int, str]]) -> Language:
    functions = []
    for column, token in tokens[1:]:
        name, _, arity = token.partition("/")
        if arity and not arity.isdigit():
            raise ParseError(f"Expected name/arity, got {token!r}", number, column)
        functions.append((name, int(arity) if arity else 0))
    return Language(tuple(functions), ())


def read_mdl(text: str, base: Optional[Path] = None) -> Structure:
    """
    Read a `.mdl` structure description into a full structure.

    Parameters:
        text: Document text
        base: Directory against which `algebra file` references resolve

    Returns:
        structure: The full structure over the closed terms up to the declared depth
    """
    lines = _Lines(text)
    algebra: Optional[FiniteHeytingAlgebra] = None
    language = Language((("*", 0),), ())
    depth = 0
    rows: List[Tuple[int, List[Tuple[int, str]]]] = []
    while lines.peek() is not None:
        number, tokens = lines.take("a declaration")
        keyword = tokens[0][1]
        if keyword == "algebra":
            algebra = _algebra_reference(number, tokens, base)
        elif keyword == "functions":
            language = _function_symbols(number, tokens)
        elif keyword == "depth":
            if len(tokens) != 2:
                raise ParseError("Expected `depth <n>`", number, tokens[0][0])
            depth = _count(number, tokens[1][0], tokens[1][1])
        else:
            rows.append((number, tokens))
    if algebra is None:
        raise ParseError("Missing `algebra` declaration", lines.last_line, 1)

    values = {label_text(a): a for a in algebra.elements}
    universe = set(closed_terms(language, depth))
    predicates: Dict[str, Dict[Tuple[Term, ...], Label]] = {}
    for number, tokens in rows:
        texts = [t for _, t in tokens]
        if "->" not in texts or texts.index("->") != len(texts) - 2:
            raise ParseError("Expected `p m1 ... mk -> h`", number, tokens[0][0])
        args = []
        for column, token in tokens[1:-2]:
            try:
                term = parse_term(token, language)
            except ParseError as e:
                raise ParseError(f"Cannot parse term {token!r}", number, column) from e
            if term not in universe:
                raise ParseError(f"{token} is outside the term universe", number, column)
            args.append(term)
        column, value = tokens[-1]
        if value not in values:
            raise ParseError(f"{value!r} is not an element of the algebra", number, column)
        predicates.setdefault(texts[0], {})[tuple(args)] = values[value]
    return Structure.full(algebra, language, depth, predicates)


def read_fml(text: str, language: Optional[Language] = None) -> List[Formula]:
    return parse_formulas(text, language)


def load(path: Union[str, Path]) -> Union[PolDocument, Structure, List[Formula]]:
    """Read a document, choosing the reader from the file suffix"""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".pol":
        return read_pol(text)
    if path.suffix == ".mdl":
        return read_mdl(text, path.parent)
    if path.suffix == ".fml":
        return read_fml(text)
    raise ParseError(f"Unknown document type {path.suffix!r}, expected .pol, .mdl or .fml")
