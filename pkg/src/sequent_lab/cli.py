"""Command-line front end of the lab.

Every command prints one report document (YAML, or JSON with `--format json`) and exits with 0 on a
verified result, 1 on a checked failure and 2 on an input error.
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import click

from sequent_lab.cut_elimination import (
    certify_interpolant,
    derive_inconsistency,
    eliminate_cuts_with_report,
    interpolate,
)
from sequent_lab.encodings import (
    FixedPointBody,
    IDFormula,
    fixpoint_kit,
    id_translate,
    induction_derivation,
    relativize,
    relativize_derivation,
)
from sequent_lab.errors import ParseError, SequentLabError
from sequent_lab.formats import load
from sequent_lab.formula_core import Formula
from sequent_lab.grammar import (
    format_derivation,
    parse_abstract,
    parse_derivation,
    parse_formula,
    parse_sequent,
    parse_term,
)
from sequent_lab.lattice_lab import (
    ClosedSetLattice,
    Embedding,
    FiniteHeytingAlgebra,
    FinitePoset,
    HeytingFrame,
    Polarity,
    chain_algebra,
    concept_lattice,
    density_check,
    enumerate_posets,
    frame_plus,
    hasse_edges,
    heyting_catalogue,
    label_text,
    macneille,
    regularity_check,
)
from sequent_lab.proof_search import (
    Member,
    SearchBudget,
    omega_cut_demo,
    omega_membership,
    sample_index_set,
    search_cutfree,
)
from sequent_lab.report import LabReport
from sequent_lab.semantics import (
    P_COUNTER_FORMULA,
    STAR_LANGUAGE,
    Structure,
    countermodel,
    default_probe_pool,
    interpret,
    omega_soundness_probe,
    p_counter2_demo,
)
from sequent_lab.sequent_kernel import LI, LIP, CalculusId, Derivation, check, cuts

# A body returns True when its verdict is a checked failure
Body = Callable[[LabReport], bool]

P_COUNTER_INDEX_FORMULA = "All X. X(c) -> X(x)"
P_COUNTER_POOL = ["bot", "p(c)", "p(c) -> bot", "r"]


def _run(ctx: click.Context, command: str, body: Body) -> None:
    report = LabReport(command=command)
    try:
        failed = body(report)
    except SequentLabError as e:
        report.verdict = "error"
        report.data = {"error": type(e).__name__, "message": str(e)}
        if isinstance(e, ParseError):
            report.data["line"] = e.line
            report.data["column"] = e.column
        report.logs.failure(f"{type(e).__name__}: {e}")
        click.echo(report.render(ctx.obj["format"]))
        ctx.exit(2)
    click.echo(report.render(ctx.obj["format"]))
    ctx.exit(1 if failed else 0)


def _read_derivation(path: str) -> Derivation:
    return parse_derivation(Path(path).read_text(encoding="utf-8"))


def _write(output: Optional[str], d: Derivation, report: LabReport) -> None:
    text = format_derivation(d)
    report.data["derivation"] = text
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
        report.data["output"] = output


def _calculus(text: str) -> CalculusId:
    try:
        return CalculusId.parse(text)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--calculus")


def _budget(depth: Optional[int], nodes: Optional[int], terms: Optional[str]) -> SearchBudget:
    base = SearchBudget.from_settings()
    candidates = tuple(parse_term(t.strip()) for t in terms.split(",") if t.strip()) if terms else base.term_candidates
    return SearchBudget(
        max_depth=depth if depth is not None else base.max_depth,
        term_candidates=candidates,
        max_nodes=nodes if nodes is not None else base.max_nodes,
    )


def budget_options(f: Callable) -> Callable:
    f = click.option("--terms", default=None, help="Extra instantiation terms, comma separated")(f)
    f = click.option("--nodes", type=int, default=None, help="Maximum number of visited sequents")(f)
    f = click.option("--depth", type=int, default=None, help="Maximum branch depth")(f)
    return f


def _formulas(texts: Sequence[str]) -> List[Formula]:
    return [parse_formula(t) for t in texts]


def _verdict_of(report: LabReport, d: Derivation, calculus: CalculusId) -> bool:
    violations = check(d, calculus)
    report.data["calculus"] = str(calculus)
    report.data["violations"] = [str(v) for v in violations]
    report.verdict = "violations" if violations else "ok"
    if violations:
        report.logs.failure(f"{len(violations)} violations in {calculus}")
    return bool(violations)


@click.group()
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True, help="Report format"
)
@click.version_option(package_name="sequent-lab")
@click.pass_context
def cli(ctx: click.Context, fmt: str) -> None:
    """Check, transform and search sequent derivations, and run the lattice and countermodel experiments."""
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt


@cli.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--calculus", default="LIT", show_default=True, help="LI, LIP<n> or LIT")
@click.pass_context
def check_command(ctx: click.Context, path: str, calculus: str) -> None:
    """Check a .sqp derivation against a calculus."""
    calc = _calculus(calculus)

    def body(report: LabReport) -> bool:
        d = _read_derivation(path)
        report.data["endsequent"] = str(d.conclusion)
        report.data["nodes"] = d.node_count()
        report.data["cuts"] = sum(1 for _ in cuts(d))
        return _verdict_of(report, d, calc)

    _run(ctx, "check", body)


@cli.command("elim-cut")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write the cut-free derivation")
@click.pass_context
def elim_cut_command(ctx: click.Context, path: str, output: Optional[str]) -> None:
    """Eliminate every cut of a first-order derivation."""

    def body(report: LabReport) -> bool:
        d = _read_derivation(path)
        result, stats = eliminate_cuts_with_report(d, report.logs)
        report.data["passes"] = stats.passes
        report.data["pass_ranks"] = stats.pass_ranks
        report.data["nodes_before"] = stats.nodes_before
        report.data["nodes_after"] = stats.nodes_after
        report.data["cuts"] = sum(1 for _ in cuts(result))
        _write(output, result, report)
        return _verdict_of(report, result, LI)

    _run(ctx, "elim-cut", body)


@cli.command("interpolate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--left", "left", multiple=True, help="Formula of the left part, repeatable")
@click.option("--right", "right", multiple=True, help="Formula of the right part, repeatable")
@click.option("--certify/--no-certify", default=True, show_default=True, help="Re-prove the interpolant by search")
@budget_options
@click.pass_context
def interpolate_command(
    ctx: click.Context,
    path: str,
    left: Sequence[str],
    right: Sequence[str],
    certify: bool,
    depth: Optional[int],
    nodes: Optional[int],
    terms: Optional[str],
) -> None:
    """Interpolant of a cut-free LI derivation for a partition of its antecedent."""

    def body(report: LabReport) -> bool:
        d = _read_derivation(path)
        left_part, right_part = _formulas(left), _formulas(right)
        found = interpolate(d, left_part, right_part)
        report.data["interpolant"] = str(found)
        if not certify:
            return False
        budget = _budget(depth, nodes, terms) if (depth, nodes, terms) != (None, None, None) else None
        certificate = certify_interpolant(d, left_part, right_part, found, budget, report.logs)
        report.data["certified"] = certificate.ok
        report.data["notes"] = certificate.notes
        report.verdict = "ok" if certificate.ok else "uncertified"
        return not certificate.ok

    _run(ctx, "interpolate", body)


@cli.command("search")
@click.argument("sequent")
@budget_options
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write the derivation found")
@click.pass_context
def search_command(
    ctx: click.Context, sequent: str, depth: Optional[int], nodes: Optional[int], terms: Optional[str], output: Optional[str]
) -> None:
    """Search a cut-free LI derivation of a sequent such as 'p, p -> q |- q'."""

    def body(report: LabReport) -> bool:
        goal = parse_sequent(sequent)
        result = search_cutfree(goal, _budget(depth, nodes, terms), report.logs)
        report.data["sequent"] = str(goal)
        if isinstance(result, Derivation):
            report.verdict = "found"
            _write(output, result, report)
            return False
        report.verdict = "not-found-within-budget"
        report.data["reason"] = result.reason
        report.data["nodes_visited"] = result.nodes_visited
        return True

    _run(ctx, "search", body)


@cli.group("omega")
def omega() -> None:
    """Ω index sets and the Ω-rule."""


@omega.command("membership")
@click.argument("formula")
@click.option("--delta", multiple=True, help="Formula of the context Δ, repeatable")
@click.option("--lam", default=None, help="Succedent Λ for an ∃X formula")
@budget_options
@click.pass_context
def omega_membership_command(
    ctx: click.Context,
    formula: str,
    delta: Sequence[str],
    lam: Optional[str],
    depth: Optional[int],
    nodes: Optional[int],
    terms: Optional[str],
) -> None:
    """Is Δ in the level 0 index set of a formula ∀X.φ or ∃X.φ?"""

    def body(report: LabReport) -> bool:
        q = parse_formula(formula)
        verdict = omega_membership(
            q, _formulas(delta), _budget(depth, nodes, terms), parse_formula(lam) if lam else None, report.logs
        )
        report.data["formula"] = str(q)
        report.data["delta"] = list(delta)
        if isinstance(verdict, Member):
            report.verdict = "member"
            report.data["defining_sequent"] = str(verdict.sequent)
            report.data["certificate"] = format_derivation(verdict.derivation)
            return False
        report.verdict = "not-found-within-budget"
        report.data["reason"] = verdict.reason
        return True

    _run(ctx, "omega membership", body)


def _omega_cut(report: LabReport) -> bool:
    result = omega_cut_demo(report.logs)
    report.data.update(result)
    report.data["reduced"] = format_derivation(result["reduced"])  # type: ignore
    report.data["left_premise"] = format_derivation(result["left_premise"])  # type: ignore
    report.verdict = "ok" if result["same_endsequent"] else "failed"
    return not result["same_endsequent"]


@omega.command("reduce")
@click.pass_context
def omega_reduce_command(ctx: click.Context) -> None:
    """Reduce the bundled cut on an Ω-rule conclusion."""
    _run(ctx, "omega reduce", _omega_cut)


def _structure(model: Optional[str]) -> Structure:
    document = load(model) if model else None
    if document is None:
        return p_counter_structure()
    if not isinstance(document, Structure):
        raise ParseError(f"{model} does not describe a structure")
    return document


def p_counter_structure(algebra: Optional[FiniteHeytingAlgebra] = None) -> Structure:
    return Structure.full(algebra or chain_algebra(), STAR_LANGUAGE, depth=0)


@omega.command("probe")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), default=None, help=".mdl structure")
@click.option("--formula", default=P_COUNTER_FORMULA, show_default=True, help="Closed level 0 formula ∀X.φ")
@click.option("--pool", type=click.Path(exists=True, dir_okay=False), default=None, help=".fml file, one context per line")
@budget_options
@click.pass_context
def omega_probe_command(
    ctx: click.Context,
    model: Optional[str],
    formula: str,
    pool: Optional[str],
    depth: Optional[int],
    nodes: Optional[int],
    terms: Optional[str],
) -> None:
    """Test the left Ω-rule with target ⊥ against a structure."""

    def body(report: LabReport) -> bool:
        s = _structure(model)
        q = parse_formula(formula, STAR_LANGUAGE if model is None else None)
        contexts = [[f] for f in load(pool)] if pool else default_probe_pool()  # type: ignore
        budget = _budget(depth, nodes, terms) if (depth, nodes, terms) != (None, None, None) else None
        probe = omega_soundness_probe(s, q, contexts, budget, report.logs)
        report.data["probe"] = probe
        report.verdict = "UNSOUND-INSTANCE" if probe.unsound_instance else "ok"
        return False

    _run(ctx, "omega probe", body)


@cli.group("lattice")
def lattice() -> None:
    """Polarities, Heyting frames and MacNeille completions."""


def _completion(path: str, heyting: bool, report: LabReport) -> Embedding:
    document = load(path)
    if not isinstance(document, FinitePoset):
        raise ParseError(f"{path} does not hold a poset or an algebra")
    completion, embedding = macneille(document, "heyting" if heyting else "lattice", report.logs)
    _lattice_data(completion, report)
    return embedding


def _lattice_data(closed: ClosedSetLattice, report: LabReport) -> None:
    report.data["elements"] = [label_text(x) for x in closed.members]
    report.data["hasse"] = [list(edge) for edge in hasse_edges(closed.as_lattice())]


@lattice.command("complete")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--heyting", is_flag=True, help="Complete as a Heyting algebra")
@click.pass_context
def lattice_complete_command(ctx: click.Context, path: str, heyting: bool) -> None:
    """Concept lattice of a polarity, or MacNeille completion of a poset or algebra."""

    def body(report: LabReport) -> bool:
        document = load(path)
        if isinstance(document, (Polarity, HeytingFrame)):
            polarity = document.polarity if isinstance(document, HeytingFrame) else document
            _lattice_data(concept_lattice(polarity, report.logs), report)
            return False
        embedding = _completion(path, heyting, report)
        report.data["embedding"] = {label_text(a): label_text(embedding(a)) for a in embedding.source.elements}
        return False

    _run(ctx, "lattice complete", body)


@lattice.command("frame")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def lattice_frame_command(ctx: click.Context, path: str) -> None:
    """The Heyting algebra W⁺ of a frame."""

    def body(report: LabReport) -> bool:
        document = load(path)
        if not isinstance(document, HeytingFrame):
            raise ParseError(f"{path} does not hold a frame")
        algebra = frame_plus(document, report.logs)
        report.data["elements"] = [label_text(x) for x in algebra.elements]
        report.data["hasse"] = [list(edge) for edge in hasse_edges(algebra)]
        return False

    _run(ctx, "lattice frame", body)


@lattice.command("density")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--heyting", is_flag=True, help="Complete as a Heyting algebra")
@click.pass_context
def lattice_density_command(ctx: click.Context, path: str, heyting: bool) -> None:
    """Join- and meet-density of the completion embedding."""

    def body(report: LabReport) -> bool:
        result = density_check(_completion(path, heyting, report))
        report.data["density"] = result
        dense = result.join_dense and result.meet_dense and result.rules_agree
        report.verdict = "ok" if dense else "not-dense"
        return not dense

    _run(ctx, "lattice density", body)


@lattice.command("regularity")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--heyting", is_flag=True, help="Complete as a Heyting algebra")
@click.pass_context
def lattice_regularity_command(ctx: click.Context, path: str, heyting: bool) -> None:
    """Does the completion embedding preserve the existing joins and meets?"""

    def body(report: LabReport) -> bool:
        regular = regularity_check(_completion(path, heyting, report))
        report.data["regular"] = regular
        report.verdict = "ok" if regular else "not-regular"
        return not regular

    _run(ctx, "lattice regularity", body)


@lattice.command("catalogue")
@click.option("--max-size", type=int, default=5, show_default=True, help="Largest algebra size")
@click.pass_context
def lattice_catalogue_command(ctx: click.Context, max_size: int) -> None:
    """Count the finite Heyting algebras up to isomorphism, by size."""

    def body(report: LabReport) -> bool:
        sizes: Dict[int, int] = {}
        for algebra in heyting_catalogue(max_size, report.logs):
            sizes[len(algebra)] = sizes.get(len(algebra), 0) + 1
        report.data["sizes"] = sizes
        report.data["total"] = sum(sizes.values())
        return False

    _run(ctx, "lattice catalogue", body)


@lattice.command("posets")
@click.argument("n", type=click.IntRange(0, 7))
@click.pass_context
def lattice_posets_command(ctx: click.Context, n: int) -> None:
    """Count the partial orders on up to N points, up to isomorphism."""

    def body(report: LabReport) -> bool:
        report.data["counts"] = {size: len(enumerate_posets(size, report.logs)) for size in range(n + 1)}
        return False

    _run(ctx, "lattice posets", body)


@cli.command("eval")
@click.argument("text")
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True, help=".mdl structure")
@click.pass_context
def eval_command(ctx: click.Context, text: str, model: str) -> None:
    """Value of a closed formula, or validity of a sequent containing '|-', in a structure."""

    def body(report: LabReport) -> bool:
        s = _structure(model)
        if "|-" in text:
            seq = parse_sequent(text)
            report.data["sequent"] = str(seq)
            witness = countermodel(seq, s)
            if witness is None:
                report.verdict = "valid"
                return False
            valuation, assignment = witness
            report.verdict = "invalid"
            report.data["countermodel"] = {
                "sets": {name: [label_text(x) for x in fn] for name, fn in valuation.items()},
                "terms": {name: str(t) for name, t in assignment.items()},
            }
            return True
        f = parse_formula(text)
        report.data["formula"] = str(f)
        report.data["value"] = label_text(interpret(f, s))
        return False

    _run(ctx, "eval", body)


@cli.group("encode")
def encode() -> None:
    """Second-order encodings of arithmetic and inductive definitions."""


def _emit_derivation(report: LabReport, d: Derivation, calculus: CalculusId, output: Optional[str]) -> bool:
    report.data["endsequent"] = str(d.conclusion)
    _write(output, d, report)
    return _verdict_of(report, d, calculus)


output_option = click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write the derivation")


@encode.command("relativize")
@click.argument("formula")
@click.pass_context
def encode_relativize_command(ctx: click.Context, formula: str) -> None:
    """Relativize the first-order quantifiers of a formula to Nn."""

    def body(report: LabReport) -> bool:
        f = parse_formula(formula)
        result = relativize(f)
        report.data["formula"] = str(f)
        report.data["relativized"] = str(result)
        report.data["level"] = result.level
        return False

    _run(ctx, "encode relativize", body)


@encode.command("induction")
@click.argument("formula")
@click.option("--variable", default=None, help="Induction variable, defaults to the only free one")
@output_option
@click.pass_context
def encode_induction_command(ctx: click.Context, formula: str, variable: Optional[str], output: Optional[str]) -> None:
    """Derive the relativized induction instance of a formula."""

    def body(report: LabReport) -> bool:
        d = induction_derivation(parse_formula(formula), variable)
        return _emit_derivation(report, d, LIP(0), output)

    _run(ctx, "encode induction", body)


@encode.command("fixpoint")
@click.argument("formula")
@click.option("--set-var", default="X", show_default=True)
@click.option("--term-var", default="x", show_default=True)
@click.option("--n", "level", type=int, default=None, help="Calculus LIP<n>, defaults to the level of Fix")
@click.option("--tau", default=None, help="Abstract for the second fixed-point law, e.g. '\\z. p(z)'")
@output_option
@click.pass_context
def encode_fixpoint_command(
    ctx: click.Context,
    formula: str,
    set_var: str,
    term_var: str,
    level: Optional[int],
    tau: Optional[str],
    output: Optional[str],
) -> None:
    """Least fixed point of a positive body φ(X, x) and its two laws."""

    def body(report: LabReport) -> bool:
        kit = fixpoint_kit(parse_formula(formula), level, set_var, term_var)
        report.data["fix"] = str(kit.fix)
        report.data["level"] = kit.level
        report.data["lfp1"] = str(kit.lfp1_statement)
        calculus = LIP(kit.n)
        if tau is None:
            return _emit_derivation(report, kit.lfp1, calculus, output)
        abstract = parse_abstract(tau)
        report.data["lfp2"] = str(kit.lfp2_statement(abstract))
        return _emit_derivation(report, kit.lfp2(abstract), calculus, output)

    _run(ctx, "encode fixpoint", body)


@encode.command("id-translate")
@click.argument("formula")
@click.option("--body", "bodies", multiple=True, help="Fixed-point body as name=FORMULA over X and x, repeatable")
@click.pass_context
def encode_id_translate_command(ctx: click.Context, formula: str, bodies: Sequence[str]) -> None:
    """Translate a formula with fixed-point atoms into the second-order language."""

    def body(report: LabReport) -> bool:
        parsed = []
        for item in bodies:
            name, sep, text = item.partition("=")
            if not sep or not name.strip():
                raise click.BadParameter(f"Expected name=FORMULA, got {item!r}", param_hint="--body")
            parsed.append(FixedPointBody(name.strip(), parse_formula(text)))
        phi = IDFormula(parse_formula(formula), tuple(parsed))
        result = id_translate(phi)
        report.data["id_level"] = phi.id_level
        report.data["translation"] = str(result)
        report.data["level"] = result.level
        return False

    _run(ctx, "encode id-translate", body)


@encode.command("relativize-derivation")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@output_option
@click.pass_context
def encode_relativize_derivation_command(ctx: click.Context, path: str, output: Optional[str]) -> None:
    """Relativize an LI derivation of closed formulas to Nn."""

    def body(report: LabReport) -> bool:
        d = relativize_derivation(_read_derivation(path))
        return _emit_derivation(report, d, LIP(0), output)

    _run(ctx, "encode relativize-derivation", body)


@cli.group("demo")
def demo() -> None:
    """The bundled demonstrations."""


@demo.command("p-counter2")
@click.option("--algebra", "algebra_path", type=click.Path(exists=True, dir_okay=False), default=None, help=".pol algebra")
@click.pass_context
def demo_p_counter2_command(ctx: click.Context, algebra_path: Optional[str]) -> None:
    """Ω-rule countermodel over the three-element chain, or another algebra."""

    def body(report: LabReport) -> bool:
        algebra = None
        if algebra_path:
            document = load(algebra_path)
            if not isinstance(document, FiniteHeytingAlgebra):
                raise ParseError(f"{algebra_path} does not hold an algebra")
            algebra = document
        result = p_counter2_demo(algebra, logger=report.logs)
        report.data.update(result)
        report.verdict = "UNSOUND-INSTANCE" if result["probe"].unsound_instance else "ok"  # type: ignore
        return False

    _run(ctx, "demo p-counter2", body)


@demo.command("omega-cut")
@click.pass_context
def demo_omega_cut_command(ctx: click.Context) -> None:
    """Reduce a cut against an Ω-rule to a stored premise."""
    _run(ctx, "demo omega-cut", _omega_cut)


@demo.command("p-counter")
@click.option("--depth", type=int, default=8, show_default=True, help="Search depth of the certificates")
@click.pass_context
def demo_p_counter_command(ctx: click.Context, depth: int) -> None:
    """Sample the index set of ∀X.(X(c)→X(x)) and derive Δ ⇒ ⊥ for every member."""

    def body(report: LabReport) -> bool:
        q = parse_formula(P_COUNTER_INDEX_FORMULA)
        pool = _formulas(P_COUNTER_POOL)
        budget = SearchBudget(max_depth=depth)
        members = []
        failed = False
        for delta, member in sample_index_set(q, pool, budget, report.logs):
            derived = derive_inconsistency(delta, member.derivation, budget)
            proof = derived["inconsistency"]
            failed = failed or proof is None
            members.append(
                {
                    "delta": sorted(str(f) for f in delta),
                    "interpolant": str(derived["interpolant"]),
                    "inconsistency": format_derivation(proof) if proof is not None else None,  # type: ignore
                }
            )
        report.data["formula"] = str(q)
        report.data["pool"] = P_COUNTER_POOL
        report.data["members"] = members
        report.verdict = "failed" if failed else "ok"
        return failed

    _run(ctx, "demo p-counter", body)


def main() -> None:
    cli(obj={}, prog_name="sequent-lab")


if __name__ == "__main__":
    main()
