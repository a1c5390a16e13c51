"""``probscheme`` command-line front end.

Exit status is 0 on success (or a check that holds), 1 when a checked
property is false, and 2 on any input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from .algebras import Partition, partition_from_functions, trivial_partition
from .bundles import Bundle
from .condexp import cond_expectation
from .core import (
    RandomFunction,
    RandomVariable,
    distribution_scheme,
    expectation,
    format_label,
    format_rational,
    joint,
    to_rational,
    variance,
)
from .documents import Document, dumps, label_json, parse_document, to_json
from .errors import ProbSchemeError, SemanticError, UnknownCommand
from .fiberprod import (
    cond_independent,
    fiber_product,
    markov_build,
    markov_verify,
    path_coordinates,
)
from .laws import run_laws
from .stats import chebyshev_check, linear_regression, wlln_certificate

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2

COMMANDS = (
    "validate", "expect", "condexp", "regress", "chebyshev", "wlln", "fiberprod",
    "condindep", "markov-check", "markov-build", "dist-scheme", "laws-check",
)


class UsageError(ProbSchemeError):
    pass


class Result:
    """What a command produced: a JSON value, and whether its check held."""

    def __init__(self, value, holds=True, report=False):
        self.value = value
        self.holds = holds
        self.report = report


def _report(command, holds=None, **fields):
    # Checks carry a "holds" field; plain computations do not.
    body = {"kind": "report", "command": command}
    if holds is not None:
        body["holds"] = holds
    body.update(fields)
    return Result(body, holds is not False, report=True)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, tuple):
        return label_json(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_jsonable(v) for v in obj]
    return obj


def _values(X: RandomVariable) -> dict:
    return {format_label(x): format_rational(v) for x, v in X.items()}


def _take(docs, kinds, what, command):
    for i, d in enumerate(docs):
        if d.kind in kinds:
            return docs.pop(i).value
    raise UsageError(f"{command}: missing {what} input ({' or '.join(kinds)} document)")


def _no_more(docs, command):
    if docs:
        raise UsageError(f"{command}: unexpected extra {docs[0].kind} input")


# -- commands ----------------------------------------------------------------

def cmd_validate(docs, opts):
    if len(docs) != 1:
        raise UsageError("validate: expects exactly one input document")
    return Result(to_json(docs[0]))


def cmd_expect(docs, opts):
    X = _take(docs, ("rv",), "random variable", "expect")
    _no_more(docs, "expect")
    return _report("expect", expectation=expectation(X), variance=variance(X))


def cmd_condexp(docs, opts):
    X = _take(docs, ("rv",), "random variable", "condexp")
    if any(d.kind == "partition" for d in docs):
        P = _take(docs, ("partition",), "partition", "condexp")
    else:
        given = [d.value for d in docs if d.kind in ("rv", "rf")]
        if not given:
            raise UsageError("condexp: needs a partition or random functions to condition on")
        docs[:] = [d for d in docs if d.kind not in ("rv", "rf")]
        P = partition_from_functions(given, X.domain)
    _no_more(docs, "condexp")
    return Result(to_json(cond_expectation(X, P)))


def cmd_regress(docs, opts):
    X = _take(docs, ("rv",), "regressor X", "regress")
    Y = _take(docs, ("rv",), "response Y", "regress")
    _no_more(docs, "regress")
    r = linear_regression(X, Y)
    return _report(
        "regress",
        slope=r.slope,
        intercept=r.intercept,
        r_squared=r.r_squared,
        var_fitted=r.var_fitted,
        var_residual=r.var_residual,
        fitted=_values(r.fitted),
        residual=_values(r.residual),
    )


def _need(opts, name, command):
    value = getattr(opts, name)
    if value is None:
        raise UsageError(f"{command}: --{name} is required")
    return to_rational(value)


def cmd_chebyshev(docs, opts):
    X = _take(docs, ("rv",), "random variable", "chebyshev")
    _no_more(docs, "chebyshev")
    eps = _need(opts, "epsilon", "chebyshev")
    c = chebyshev_check(X, eps)
    return _report("chebyshev", holds=c.lhs <= c.bound, epsilon=eps, lhs=c.lhs, bound=c.bound)


def cmd_wlln(docs, opts):
    Xs = [d.value for d in docs if d.kind == "rv"]
    if len(Xs) != len(docs) or not Xs:
        raise UsageError("wlln: expects one or more rv documents")
    K = _need(opts, "K", "wlln")
    eps = _need(opts, "epsilon", "wlln")
    cert = wlln_certificate(Xs, K, eps)
    return _report(
        "wlln", holds=cert.deviation <= cert.bound, n=len(Xs), K=K, epsilon=eps,
        var_mean=cert.var_mean, bound=cert.bound, deviation=cert.deviation,
    )


def cmd_fiberprod(docs, opts):
    pi1 = _take(docs, ("bundle",), "first bundle", "fiberprod")
    pi2 = _take(docs, ("bundle",), "second bundle", "fiberprod")
    _no_more(docs, "fiberprod")
    fp = fiber_product(pi1, pi2)
    emit = {"product": fp.product, "theta1": fp.theta1, "theta2": fp.theta2, "down": fp.down}
    return Result(to_json(emit[opts.emit]))


def cmd_condindep(docs, opts):
    if len(docs) != 3 or any(d.kind not in ("rv", "rf") for d in docs):
        raise UsageError("condindep: expects exactly three rv/rf documents X, Y, Z")
    X, Y, Z = (d.value for d in docs)
    v = cond_independent(X, Y, Z)
    return _report("condindep", holds=v.holds, witness=_jsonable(v.witness))


def cmd_markov_check(docs, opts):
    if len(docs) == 1 and docs[0].kind == "scheme":
        Xs = path_coordinates(docs[0].value)
    elif all(d.kind in ("rv", "rf") for d in docs):
        Xs = [d.value for d in docs]
    else:
        raise UsageError("markov-check: expects a path scheme or a sequence of rv/rf documents")
    v = markov_verify(Xs)
    index = None if v.holds else v.witness["index"]
    return _report("markov-check", holds=v.holds, first_failing_index=index, witness=_jsonable(v.witness))


def cmd_markov_build(docs, opts):
    if len(docs) == 1 and docs[0].kind == "pairs":
        pairs = docs[0].value
    elif docs and all(d.kind == "scheme" for d in docs):
        pairs = [d.value for d in docs]
    else:
        raise UsageError("markov-build: expects a pairs document or pair scheme documents")
    return Result(to_json(markov_build(pairs)))


def cmd_dist_scheme(docs, opts):
    if not docs or any(d.kind not in ("rv", "rf") for d in docs):
        raise UsageError("dist-scheme: expects one or more rv/rf documents")
    scheme, _ = distribution_scheme(joint([d.value for d in docs]))
    return Result(to_json(scheme))


def cmd_laws_check(docs, opts):
    buckets = {RandomVariable: [], Partition: [], Bundle: [], RandomFunction: []}
    for d in docs:
        if d.kind == "scheme":
            # the suite supplies its own variables on a bare scheme
            buckets[Partition].append(trivial_partition(d.value))
            continue
        for cls, bucket in buckets.items():
            if isinstance(d.value, cls):
                bucket.append(d.value)
                break
        else:
            raise UsageError(f"laws-check: cannot use a {d.kind} document")
    results = run_laws(buckets[RandomVariable], buckets[Partition], buckets[Bundle], buckets[RandomFunction])
    laws = [{"name": r.name, "holds": r.holds, "witness": _jsonable(r.witness)} for r in results]
    return _report("laws-check", holds=all(r.holds for r in results), laws=laws)


HANDLERS = {
    "validate": cmd_validate,
    "expect": cmd_expect,
    "condexp": cmd_condexp,
    "regress": cmd_regress,
    "chebyshev": cmd_chebyshev,
    "wlln": cmd_wlln,
    "fiberprod": cmd_fiberprod,
    "condindep": cmd_condindep,
    "markov-check": cmd_markov_check,
    "markov-build": cmd_markov_build,
    "dist-scheme": cmd_dist_scheme,
    "laws-check": cmd_laws_check,
}


def run_command(name: str, docs: list[Document], opts=None) -> Result:
    """Dispatch *name* on parsed input documents."""
    if name not in HANDLERS:
        raise UnknownCommand(f"unknown command {name!r}; expected one of: {', '.join(COMMANDS)}")
    if opts is None:
        opts = argparse.Namespace(epsilon=None, K=None, emit="product")
    return HANDLERS[name](list(docs), opts)


# -- text output ---------------------------------------------------------------

def _use_color(stream) -> bool:
    env = os.environ.get("PROBSCHEME_COLOR")
    if env is not None:
        return env == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text, ok, color):
    if not color:
        return text
    return f"\x1b[{32 if ok else 31}m{text}\x1b[0m"


def render_report(body: dict, color: bool) -> str:
    lines = [f"{body['command']}: " + _paint("true" if body.get("holds", True) else "false",
                                            body.get("holds", True), color)]
    for key, value in body.items():
        if key in ("kind", "command", "holds", "laws"):
            continue
        lines.append(f"  {key}: {dumps(value).strip()}")
    for law in body.get("laws", []):
        mark = _paint("PASS" if law["holds"] else "FAIL", law["holds"], color)
        line = f"  {mark} {law['name']}"
        if not law["holds"] and law["witness"] is not None:
            line += f"  witness={dumps(law['witness']).strip()}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="probscheme", description="Exact finite probability schemes and bundles.")
    p.add_argument("command", help=", ".join(COMMANDS))
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE",
                   help="input document; repeatable; '-' reads standard input")
    p.add_argument("--out", metavar="FILE", help="write output here instead of standard output")
    p.add_argument("--format", choices=("canonical", "pretty"), default="canonical")
    p.add_argument("--epsilon", help="deviation threshold for chebyshev/wlln, e.g. 1/2")
    p.add_argument("--K", help="variance bound for wlln")
    p.add_argument("--emit", choices=("product", "theta1", "theta2", "down"), default="product",
                   help="which part of the fiber product to output")
    return p


def _load_inputs(paths, stdin) -> list[Document]:
    docs = []
    for path in paths:
        if path == "-":
            docs.append(parse_document(stdin.read(), base_dir=Path.cwd()))
        else:
            try:
                text = Path(path).read_text(encoding="utf-8")
            except OSError as e:
                raise SemanticError(f"cannot read {path!r}: {e.strerror}", path) from None
            docs.append(parse_document(text, base_dir=Path(path).parent))
    return docs


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        if opts.command not in HANDLERS:
            raise UnknownCommand(f"unknown command {opts.command!r}; expected one of: {', '.join(COMMANDS)}")
        docs = _load_inputs(opts.inputs, stdin)
        result = run_command(opts.command, docs, opts)
    except UsageError as e:
        print(f"error: {e}", file=stderr)
        print(parser.format_usage(), end="", file=stderr)
        return EXIT_INPUT
    except ProbSchemeError as e:
        print(f"error: {type(e).__name__}: {e}" if not isinstance(e, SemanticError) else f"error: {e}", file=stderr)
        return EXIT_INPUT
    value = _jsonable(result.value)
    if result.report and opts.format == "pretty":
        out_stream_color = _use_color(stdout) if opts.out is None else False
        text = render_report(value, out_stream_color)
    else:
        text = dumps(value, opts.format)
    if opts.out:
        Path(opts.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return EXIT_OK if result.holds else EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
