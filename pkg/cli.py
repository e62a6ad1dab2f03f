#!/usr/bin/env python3
"""
Command-line front end for the fractal-calculus toolkit.

Each subcommand wraps one operation; config-driven commands (solve1d,
solve2d, dispersion, lacunary) read a JSON RunConfig and write CSV files
into output.directory. Exit codes: 0 success, 1 usage/config/domain/IO
error, 2 numerical non-convergence.
"""
import os
import sys
import math
import logging
import argparse

import numpy as np

import results_io
from calculus import FractalFunction, local_fractional_derivative, stieltjes_integral
from errors import FractalCalculusError, NonConvergenceError
from fractal import (
    CantorSeed,
    hutchinson_iterate,
    identity_seed,
    koch_ifs,
    load_ifs,
    mass_function,
    mass_sum,
    quadratic_koch_ifs,
    staircase_from_cantor,
)
from run_config import LOG_LEVEL, QUADRATURE_LEVEL, load_run_config, membrane_seed, parse_ratio
from sequence_expression import compile_expression
from valuation import (
    Scale,
    SequenceSpec,
    classify_sequence,
    rg_phenomenological_value,
    rg_renormalization_constant,
    valuation,
)
from waves import (
    WaveProblem1D,
    WaveProblem2D,
    dispersion_table,
    eval_solution_1d,
    eval_solution_2d,
    lacunary_partial_sum,
    solve_1d,
    solve_2d,
)

# --- Configuration ---
BANNER = "*" * 80
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
SUMMARY_MODES = 8


def _banner(title: str):
    print("\n" + BANNER)
    print(title)
    print(BANNER)


def _seed_from_args(args) -> CantorSeed:
    if args.identity:
        return identity_seed()
    return CantorSeed(args.pieces, parse_ratio(args.ratio))


def build_staircase(section, level_cap: int):
    """Staircase for a SeedSection of the run configuration."""
    seed = identity_seed() if section.kind == "identity" else CantorSeed(section.pieces, section.ratio)
    return staircase_from_cantor(seed, section.level, level_cap=level_cap)


def _describe_seed(seed: CantorSeed) -> str:
    if seed.is_identity:
        return "seed=identity dimension=1"
    return f"seed=cantor m={seed.pieces} ratio={seed.ratio:.17g} dimension={seed.dimension_s:.17g}"


# --- Subcommands ---

def cmd_classify(args) -> int:
    sequence = compile_expression(args.expression, ("n",))
    scale = compile_expression(args.scale, ("n",))
    seq = SequenceSpec(sequence.as_function("n"), args.n0, args.levels, not args.grid_only)
    scale_seq = SequenceSpec(scale.as_function("n"), args.n0, args.levels, not args.grid_only)
    result = classify_sequence(seq, scale_seq)

    _banner(f"Classification of {args.expression} against scale {args.scale}")
    print(f"Label:            {result.label.value}")
    print(f"Exponent:         {result.exponent_estimate:.12g}")
    print(f"Rate:             {result.rate.value}")
    print(f"Log-slope:        {result.slope:.6g}")
    print(f"Sign alternations:{result.sign_alternations:>4d}")
    print(f"Samples used:     {result.samples}")
    print(BANNER)
    return EXIT_OK


def cmd_valuation(args) -> int:
    scale = Scale(args.delta)
    v = valuation(args.x, scale)
    _banner(f"Valuation of x={args.x!r} at delta={args.delta!r}")
    print(f"v(x):                {v:.17g}")
    print(f"Z = delta^-v:        {rg_renormalization_constant(v, scale):.17g}")
    if args.x > args.delta:
        print(f"X_ph = (delta/x)^v:  {rg_phenomenological_value(args.x, scale):.17g}")
    print(BANNER)
    return EXIT_OK


def cmd_staircase(args) -> int:
    seed = _seed_from_args(args)
    st = staircase_from_cantor(seed, args.level)
    frame = results_io.staircase_frame(st, args.samples)
    results_io.write_table(frame, args.out, comment=_describe_seed(seed))
    _banner("Staircase written")
    print(f"{_describe_seed(seed)} level={args.level}")
    print(f"{len(frame)} samples saved to '{args.out}'.")
    print(BANNER)
    return EXIT_OK


def cmd_massfn(args) -> int:
    if args.ifs:
        ifs = load_ifs(args.ifs)
    elif args.quadratic:
        ifs = quadratic_koch_ifs()
    else:
        ifs = koch_ifs(args.alpha if args.alpha is not None else math.pi / 3)
    curve = hutchinson_iterate(ifs, args.level)
    s = curve.dimension_s if args.s is None else args.s
    level_sum = mass_sum(curve, s, args.a, args.b)
    refined = mass_function(curve, s, args.a, args.b)

    _banner(f"Mass function of {ifs.name} on [{args.a}, {args.b}]")
    print(f"Similarity dimension:  {curve.dimension_s:.12g}")
    print(f"Exponent s:            {s:.12g}")
    print(f"Segments (level {args.level}):  {curve.segment_count}")
    print(f"Polyline length:       {curve.length:.12g}")
    print(f"Level-{args.level} mass sum:     {level_sum:.12g}")
    print(f"Refined mass:          {refined:.12g}")
    print(f"Max chain gap:         {curve.max_chain_gap:.3e}")
    print(BANNER)
    return EXIT_OK


def cmd_derivative(args) -> int:
    outer = compile_expression(args.function, ("u",)).as_function("u")
    st = staircase_from_cantor(_seed_from_args(args), args.level)
    value, on_support = local_fractional_derivative(FractalFunction(outer, st), args.x)
    _banner(f"Local fractional derivative of {args.function} at x={args.x!r}")
    print(f"v(x):        {st.evaluate(args.x):.17g}")
    print(f"Derivative:  {value:.12g}")
    print(f"On support:  {on_support}")
    print(BANNER)
    return EXIT_OK


def cmd_integrate(args) -> int:
    g = compile_expression(args.function, ("u",)).as_function("u")
    st = staircase_from_cantor(_seed_from_args(args), args.level)
    result = stieltjes_integral(g, st, args.a, args.b, level=args.quad_level)
    _banner(f"Stieltjes integral of {args.function} over [{args.a}, {args.b}]")
    print(f"Increment sum:        {result.value:.17g}")
    print(f"Change of variables:  {result.change_of_variable_value:.17g}")
    print(f"Discrepancy:          {result.discrepancy:.3e} (level {result.level})")
    print(f"Agreement:            {'yes' if result.converged else 'NO'}")
    print(BANNER)
    if not result.converged:
        raise NonConvergenceError("Stieltjes routes disagree", (result.value, result.change_of_variable_value))
    return EXIT_OK


def _warn_incoherent(kind: str, seeds: dict):
    distinct = {name: s for name, s in seeds.items() if s is not None}
    if len({s.model_dump_json() for s in distinct.values()}) > 1:
        logging.warning(f"{kind}: independent staircases for {', '.join(distinct)}; the coherent default uses one seed family")


def cmd_solve1d(args) -> int:
    config = load_run_config(args.config)
    section = config.wave1d
    if section is None:
        raise FractalCalculusError(f"{args.config} has no wave1d section")
    seed_x = section.seed_x or config.seed
    seed_t = section.seed_t or seed_x
    _warn_incoherent("solve1d", {"x": seed_x, "T": seed_t})

    problem = WaveProblem1D(
        length=section.length,
        speed_factor=section.speed_factor,
        staircase_x=build_staircase(seed_x, config.caps.level),
        staircase_t=build_staircase(seed_t, config.caps.level),
        initial_profile=compile_expression(section.profile, ("u",)).as_function("u"),
        n_modes=section.n_modes or config.caps.modes_1d,
        quadrature_level=config.caps.quadrature_level,
        fractalize_time=section.fractalize_time,
    )
    sol = solve_1d(problem)

    xs = np.linspace(0.0, section.length, section.points)
    out_dir = config.output.directory
    results_io.write_table(
        results_io.coefficient_frame(sol.coefficients, sol.omega_f), os.path.join(out_dir, "coefficients_1d.csv")
    )
    grid = results_io.solution_grid_1d(lambda t, x: eval_solution_1d(sol, problem, t, x), section.times, xs)
    results_io.write_table(grid, os.path.join(out_dir, "solution_1d.csv"))

    _banner("1D fractal string solution")
    print(f"v(l) = {sol.v_length:.12g}, v(c) = {section.speed_factor:.12g}, modes = {sol.coefficients.size}")
    for n, (a, w) in enumerate(zip(sol.coefficients[:SUMMARY_MODES], sol.omega_f[:SUMMARY_MODES]), start=1):
        print(f"  a_{n} = {a: .12e}   omega_{n} = {w:.12g}")
    print(f"Coefficient tail: {sol.tail:.3e}")
    if sol.smooth_limit:
        print("Smooth limit: identity staircases, classical string solution.")
    print(f"Results saved to '{out_dir}'.")
    print(BANNER)
    return EXIT_OK


def cmd_solve2d(args) -> int:
    config = load_run_config(args.config)
    section = config.wave2d
    if section is None:
        raise FractalCalculusError(f"{args.config} has no wave2d section")
    seed_x = membrane_seed(config)
    seed_y = section.seed_y or seed_x
    seed_t = section.seed_t or seed_x
    _warn_incoherent("solve2d", {"x": seed_x, "y": seed_y, "T": seed_t})

    problem = WaveProblem2D(
        speed_factor=section.speed_factor,
        staircase_x=build_staircase(seed_x, config.caps.level),
        staircase_y=build_staircase(seed_y, config.caps.level),
        staircase_t=build_staircase(seed_t, config.caps.level),
        initial_profile=compile_expression(section.profile, ("ux", "uy")).as_function("ux", "uy"),
        m_modes=section.m_modes or config.caps.modes_2d,
        n_modes=section.n_modes or config.caps.modes_2d,
        quadrature_level=config.caps.quadrature_level_2d,
        fractalize_time=section.fractalize_time,
    )
    sol = solve_2d(problem)

    axis = np.linspace(0.0, 1.0, section.points)
    out_dir = config.output.directory
    results_io.write_table(
        results_io.coefficient_frame(sol.coefficients, sol.omega), os.path.join(out_dir, "coefficients_2d.csv")
    )
    grid = results_io.solution_grid_2d(
        lambda t, x, y: eval_solution_2d(sol, problem, t, x, y), section.times, axis, axis
    )
    results_io.write_table(grid, os.path.join(out_dir, "solution_2d.csv"))

    _banner("2D fractal membrane solution")
    order = np.argsort(-np.abs(sol.coefficients), axis=None)[:SUMMARY_MODES]
    for flat in order:
        m, n = np.unravel_index(flat, sol.coefficients.shape)
        print(f"  A_{m + 1},{n + 1} = {sol.coefficients[m, n]: .12e}   omega = {sol.omega[m, n]:.12g}")
    print(f"Coefficient tail: {sol.tail:.3e}")
    if sol.smooth_limit:
        print("Smooth limit: identity staircases, classical membrane solution.")
    print(f"Results saved to '{out_dir}'.")
    print(BANNER)
    return EXIT_OK


def cmd_dispersion(args) -> int:
    config = load_run_config(args.config)
    section = config.dispersion
    if section is None:
        raise FractalCalculusError(f"{args.config} has no dispersion section")
    st = build_staircase(section.seed or config.seed, config.caps.level)
    problem = WaveProblem1D(1.0, section.speed_factor, st, st, lambda u: np.zeros_like(u))
    if section.k_values is not None:
        k_values = sorted(section.k_values)
    else:
        k_values = np.linspace(section.k_min, section.k_max, section.samples)
    table = dispersion_table(problem, k_values)

    out_path = os.path.join(config.output.directory, "dispersion.csv")
    results_io.write_table(results_io.dispersion_frame(table), out_path)
    _banner("Fractal dispersion relation omega = v(c) v(k)")
    print(f"{len(table)} wave numbers in [{table[0][0]:.6g}, {table[-1][0]:.6g}]")
    print(f"omega range: [{table[0][1]:.12g}, {table[-1][1]:.12g}]")
    print(f"Results saved to '{out_path}'.")
    print(BANNER)
    return EXIT_OK


def cmd_lacunary(args) -> int:
    config = load_run_config(args.config)
    section = config.lacunary
    if section is None:
        raise FractalCalculusError(f"{args.config} has no lacunary section")
    h_k = compile_expression(section.profile, ("x", "y")).as_function("x", "y")
    support = ((0.0, 1.0), (0.0, 1.0)) if section.support == "unit" else None
    approx = lacunary_partial_sum(section.k, h_k, section.m_cap, section.n_cap, support=support, order=section.order)

    (x_lo, x_hi), (y_lo, y_hi) = approx.support
    out_dir = config.output.directory
    results_io.write_table(
        results_io.coefficient_frame(approx.coefficients, approx.frequencies),
        os.path.join(out_dir, f"lacunary_coefficients_k{section.k}.csv"),
    )
    grid = results_io.solution_grid_2d(
        approx.evaluate,
        section.times,
        np.linspace(x_lo, x_hi, section.points),
        np.linspace(y_lo, y_hi, section.points),
    )
    results_io.write_table(grid, os.path.join(out_dir, f"lacunary_k{section.k}.csv"))

    _banner(f"Lacunary term at level k={section.k}")
    print(f"Square: a_even = {approx.boundary.a_even}, a_odd = {approx.boundary.a_odd}")
    print(f"Integration region: x in [{x_lo:.6g}, {x_hi:.6g}], y in [{y_lo:.6g}, {y_hi:.6g}]")
    print(f"A_k,1,1 = {approx.coefficients[0, 0]:.12g}   frequency = {approx.frequencies[0, 0]:.12g}")
    print(f"Amplitude bound sum|A|: {approx.amplitude_bound:.12g}")
    print(f"Results saved to '{out_dir}'.")
    print(BANNER)
    return EXIT_OK


# --- Argument parsing ---

def _add_seed_arguments(parser):
    parser.add_argument("--pieces", type=int, default=2, help="Number of Cantor pieces m (default: 2).")
    parser.add_argument("--ratio", default="1/3", help="Piece ratio, decimal or p/q (default: 1/3).")
    parser.add_argument("--level", type=int, default=40, help="Staircase digit level (default: 40).")
    parser.add_argument("--identity", action="store_true", help="Use the identity staircase v(x) = x.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Duality-structure fractal calculus toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Classify a null sequence against a scale sequence.")
    p.add_argument("expression", help="Sequence in n, e.g. 'n^(-2.5)'.")
    p.add_argument("--scale", default="n^(-1)", help="Scale sequence in n (default: n^(-1)).")
    p.add_argument("--n0", type=int, default=2 ** 10)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--grid-only", action="store_true", help="Skip the off-grid oscillation samples.")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("valuation", help="Renormalized valuation of x at scale delta.")
    p.add_argument("x", type=float)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(handler=cmd_valuation)

    p = sub.add_parser("staircase", help="Write a Cantor staircase as (xi,value) CSV.")
    _add_seed_arguments(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_staircase)

    p = sub.add_parser("massfn", help="Mass function of an IFS curve.")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=float, help="Koch angle in radians (default: pi/3).")
    group.add_argument("--quadratic", action="store_true", help="Quadratic Koch (type 2) curve.")
    group.add_argument("--ifs", help="JSON document with the IFS maps.")
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--s", type=float, help="Mass exponent (default: similarity dimension).")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.set_defaults(handler=cmd_massfn)

    p = sub.add_parser("derivative", help="Local fractional derivative of f(v(x)).")
    p.add_argument("function", help="Outer function of u, e.g. 'u^2'.")
    p.add_argument("--x", type=float, required=True)
    _add_seed_arguments(p)
    p.set_defaults(handler=cmd_derivative)

    p = sub.add_parser("integrate", help="Stieltjes integral of g(v(x)) dv(x).")
    p.add_argument("function", help="Integrand in u, e.g. 'sin(pi*u)^2'.")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--quad-level", type=int, default=QUADRATURE_LEVEL)
    _add_seed_arguments(p)
    p.set_defaults(handler=cmd_integrate)

    for name, handler, text in (
        ("solve1d", cmd_solve1d, "Fractal string vibration."),
        ("solve2d", cmd_solve2d, "Fractal membrane vibration."),
        ("dispersion", cmd_dispersion, "Fractal dispersion table."),
        ("lacunary", cmd_lacunary, "Lacunary baseline on quadratic Koch squares."),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="Path to a JSON run configuration.")
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s'
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        return args.handler(args)
    except NonConvergenceError as e:
        logging.error(f"Numerical non-convergence: {e}")
        return EXIT_NONCONVERGENCE
    except (FractalCalculusError, ValueError, OSError) as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
