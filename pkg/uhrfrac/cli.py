# -*- coding: utf-8 -*-
"""Command line interface: uhrfrac {solve,certify,verify,ml,scenarios}.

Exit codes: 0 success, 1 input error, 2 solver non-convergence,
3 contraction failure (Phi >= 1), 4 residual-premise failure.

"""

import argparse
import logging
import os
import sys

from . import __version__
from .analysis.picard import perturb, picard_solve
from .analysis.stability import (certify, check_hypotheses, envelope,
                                 residual_check, verify_envelope)
from .calculus.mittagleffler import mittag_leffler
from .errors import ContractionError, ConvergenceError, UHRFracError
from .model.problem import builtin_scenario, list_scenarios, load_problem_file
from .util.report import CSVRecorder, RunReport

__all__ = ('main',)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_CONTRACTION = 3
EXIT_RESIDUAL = 4


class InputError(UHRFracError):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage errors are input errors (exit 1); 2 means non-convergence here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, "%s: error: %s\n" % (self.prog, message))


# =============================================================================

#--- ARGUMENTS ----------------------------------------------------------------

def _problem_arguments(p, epsilon=False):
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--scenario", metavar="NAME",
                        help="built-in scenario (see 'uhrfrac scenarios')")
    source.add_argument("--config", metavar="PATH",
                        help="problem configuration file")
    p.add_argument("--n", type=int, dest="n_per_interval", metavar="INT",
                   help="mesh panels per partition interval")
    p.add_argument("--grading", type=float, metavar="REAL",
                   help="mesh grading exponent (>= 1)")
    p.add_argument("--tol", type=float, metavar="REAL",
                   help="Picard stopping distance")
    p.add_argument("--max-iter", type=int, dest="max_iter", metavar="INT",
                   help="Picard iteration budget")
    p.add_argument("--memory-anchor", choices=("t", "s_i"),
                   dest="memory_anchor",
                   help="kernel anchor of the impulse memory on free "
                        "intervals")
    p.add_argument("--x0", type=float, metavar="REAL",
                   help="override the initial datum")
    p.add_argument("--out", default=".", metavar="DIR",
                   help="output directory (default: current directory)")
    if epsilon:
        p.add_argument("--epsilon", type=float, default=1e-3, metavar="REAL",
                       help="perturbation size of y = y0 + eps (phi + delta)")


def build_parser():
    parser = _Parser(prog="uhrfrac", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="more log output (repeat for debug)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND",
                                parser_class=_Parser)
    sub.required = True
    p = sub.add_parser("solve", help="solve for the mild solution y0")
    _problem_arguments(p)
    p = sub.add_parser("certify", help="contraction constant and envelope")
    _problem_arguments(p)
    p = sub.add_parser("verify", help="Ulam-Hyers-Rassias check of a "
                                      "perturbed solution")
    _problem_arguments(p, epsilon=True)
    p = sub.add_parser("ml", help="evaluate the Mittag-Leffler function")
    p.add_argument("alpha", type=float)
    p.add_argument("t", type=float)
    p.add_argument("--tol", type=float, metavar="REAL")
    sub.add_parser("scenarios", help="list the built-in scenarios")
    return parser


# =============================================================================

#--- COMMANDS -----------------------------------------------------------------

def _load(args):
    if args.scenario is not None:
        problem, hypotheses = builtin_scenario(args.scenario)
        name = args.scenario
    else:
        problem, hypotheses = load_problem_file(args.config)
        name = args.config
    if args.x0 is not None:
        problem = problem.with_x0(args.x0)
    return name, problem, hypotheses


def _out_dir(args):
    if not os.path.isdir(args.out):
        try:
            os.makedirs(args.out)
        except OSError as e:
            raise InputError("cannot create output directory %s: %s" % (
                args.out, e.strerror))
    return args.out


def _solve(args, problem, report):
    mesh = problem.mesh(args.n_per_interval, args.grading)
    result = picard_solve(problem, tol=args.tol, max_iter=args.max_iter,
                          mesh=mesh, memory_anchor=args.memory_anchor)
    report.solve += [
        "derivative: %s (gamma = %r)" % (problem.order.kind,
                                          problem.gamma),
        "nodes: %i" % len(mesh),
        "iterations: %i" % result.iterations,
        "final distance: %.6e" % result.final_diff,
        "converged: %s" % ("yes" if result.converged else "no"),
    ]
    return result


def cmd_solve(args):
    name, problem, hypotheses = _load(args)
    out = _out_dir(args)
    report = RunReport(name, "solve")
    result = _solve(args, problem, report)
    table = CSVRecorder(os.path.join(out, "solution.csv"), ("t", "y0"))
    table.record_columns(result.mesh.nodes, result.y0.raw())
    report.outputs.append(table.save())
    report.save(out)
    print("\n".join(report.solve))
    if not result.converged:
        print("uhrfrac: solver did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_certify(args):
    name, problem, hypotheses = _load(args)
    cert = certify(problem, hypotheses)
    lines = cert.lines()
    check = check_hypotheses(problem, hypotheses,
                             problem.mesh(args.n_per_interval, args.grading))
    lines.append("H6 sup I phi / phi: %.6g (%s C_phi = %r)" % (
        check.h6_sup, "<=" if check.h6_ok else ">", hypotheses.C_phi))
    print("\n".join(lines))
    if not cert.contraction_ok:
        return EXIT_CONTRACTION
    return EXIT_OK


def cmd_verify(args):
    name, problem, hypotheses = _load(args)
    out = _out_dir(args)
    report = RunReport(name, "verify --epsilon %r" % args.epsilon)
    cert = certify(problem, hypotheses)
    report.certificate = cert.lines()
    if not cert.contraction_ok:
        report.save(out)
        raise ContractionError("Phi = %.12g >= 1, the envelope does not "
                               "apply" % cert.phi_constant)
    result = _solve(args, problem, report)
    if not result.converged:
        report.save(out)
        print("uhrfrac: solver did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE

    mesh, y0 = result.mesh, result.y0
    y = perturb(y0, hypotheses.phi, hypotheses.delta, args.epsilon,
                problem.psi)
    residuals = residual_check(problem, hypotheses, y,
                               memory_anchor=args.memory_anchor)
    report.residuals = residuals.lines()
    ok, violation = verify_envelope(y, y0, cert, hypotheses.phi, mesh,
                                    problem.psi)
    bound = envelope(cert, hypotheses.phi, mesh, problem.psi)
    report.envelope = [
        "satisfied: %s" % ("yes" if ok else "no"),
        "max violation: %.6e" % violation,
    ]
    table = CSVRecorder(os.path.join(out, "verify.csv"),
                        ("t", "y", "y0", "envelope"))
    table.record_columns(mesh.nodes, y.raw(), y0.raw(), bound)
    report.outputs.append(table.save())
    report.save(out)
    print(report.text(), end="")
    if not residuals.satisfied:
        print("uhrfrac: the integral inequalities do not hold for y, the "
              "envelope bound is not applicable", file=sys.stderr)
        return EXIT_RESIDUAL
    if not ok:
        print("uhrfrac: envelope violated by %.6e" % violation,
              file=sys.stderr)
        return EXIT_RESIDUAL
    return EXIT_OK


def cmd_ml(args):
    print("%#.12g" % mittag_leffler(args.alpha, args.t, args.tol))
    return EXIT_OK


def cmd_scenarios(args):
    for name, description in list_scenarios():
        print("%-16s %s" % (name, description))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "ml": cmd_ml,
    "scenarios": cmd_scenarios,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger("uhrfrac").setLevel(
            logging.DEBUG if args.verbose > 1 else logging.INFO)
    try:
        return COMMANDS[args.command](args)
    except ContractionError as e:
        print("uhrfrac: error: %s" % e, file=sys.stderr)
        return EXIT_CONTRACTION
    except ConvergenceError as e:
        print("uhrfrac: error: %s" % e, file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (UHRFracError, OSError) as e:
        print("uhrfrac: error: %s" % e, file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
