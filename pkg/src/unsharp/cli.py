"""Command-line harness.

Every subcommand writes ``<command>.json`` (and ``<command>.csv`` where a
table makes sense) into ``--out-dir``, defaulting to ``$UNSHARP_OUTPUT_DIR``
or the current directory.  The JSON always carries the tool version, the
command, the full parameter map and the seed.

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.

Examples::

    unsharp chsh-scan --eta-min 0 --eta-max 1 --steps 21 --seed 7
    unsharp epr-robustness --dim 2 --eps-grid 1e-4,1e-3,1e-2,1e-1 --trials 1000 --seed 3
    unsharp track --alpha0 2 --dynamics harmonic --omega 1 --dt 0.1 --steps 100 --seed 11
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .channels import epr_robustness_probe, luders_general, luders_sharp, near_eigenstate_pair
from .classical import (
    ClassicalEffectFn,
    RayPoint,
    mb_consistency_mc,
    random_measure,
    ray_overlap_geometry,
)
from .errors import NumericalError, ValidationError
from .experiments.chsh import chsh_unsharpness_scan, violation_threshold
from .experiments.frequency import MAX_TENSOR_N, frequency_operator_stats
from .experiments.phasespace import FockSpace, husimi_pom, track_simulate, tube_report
from .experiments.premeasurement import premeasurement_demo
from .linalg import bloch_operator, projector, random_unitary
from .observables import (
    GridPositionMeasure,
    construct_joint_qubit,
    marginals,
    smear_discrete,
    smeared_position_pom,
    spin_z_pom,
    unbiased_qubit_pom,
)
from .serialize import (
    complex_to_pairs,
    measure_from_dict,
    measure_to_dict,
    pairs_to_complex,
    pom_to_dict,
    state_from_dict,
    state_to_dict,
    write_csv,
    write_json,
)
from .states import (
    Effect,
    Projection,
    State,
    as_projection,
    classify_property,
    degree_of_reality,
    is_regular,
    qubit_nonorthogonal_decomposition,
    sharpness_report,
    spectral_decompose_effect,
)

log = logging.getLogger("unsharp")

OUTPUT_ENV = "UNSHARP_OUTPUT_DIR"
EPR_SHARD_SIZE = 250

_NAMED_KETS = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [1, 1],
    "-": [1, -1],
    "+i": [1, 1j],
    "-i": [1, -1j],
}


# ---------------------------------------------------------------------------
# parsing helpers


def parse_floats(text):
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def parse_complexes(text):
    try:
        return [complex(x.strip().replace("i", "j")) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated complex numbers, got {text!r}") from None


def parse_matrix(text):
    """Rows separated by ``;``, entries by ``,``."""
    rows = [parse_floats(r) for r in str(text).split(";")]
    if len({len(r) for r in rows}) != 1:
        raise ValidationError(f"ragged matrix {text!r}")
    return np.array(rows)


def parse_operator(text):
    """Operator from ``ket:..``, ``diag:..``, ``bloch:x,y,z``, a named qubit ket or a JSON file.

    JSON files hold ``{"matrix": [[[re, im], ...], ...]}`` or
    ``{"state_vector": [[re, im], ...]}``.
    """
    text = str(text).strip()
    if text in _NAMED_KETS:
        return projector(_NAMED_KETS[text])
    kind, _, body = text.partition(":")
    if kind == "ket" and body:
        return projector(parse_complexes(body))
    if kind == "diag" and body:
        return np.diag(parse_complexes(body))
    if kind == "bloch" and body:
        v = parse_floats(body)
        if len(v) != 3:
            raise ValidationError("bloch: needs three components")
        return bloch_operator(v)
    path = Path(text)
    if path.suffix == ".json" and path.exists():
        d = json.loads(path.read_text())
        if "state_vector" in d:
            return projector(pairs_to_complex(d["state_vector"]))
        return pairs_to_complex(d["matrix"])
    raise ValidationError(f"cannot parse operator {text!r}")


def parse_ray(text):
    text = str(text).strip()
    if text in _NAMED_KETS:
        return RayPoint(_NAMED_KETS[text])
    kind, _, body = text.partition(":")
    if kind == "ket":
        return RayPoint(parse_complexes(body))
    return RayPoint.from_projection(parse_operator(text))


def _complex_arg(text):
    try:
        return complex(str(text).replace("i", "j"))
    except ValueError:
        raise ValidationError(f"not a complex number: {text!r}") from None


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


# ---------------------------------------------------------------------------
# commands: each returns (results dict, optional (header, rows) table)


def cmd_degree(args):
    s, e = State(parse_operator(args.state)), Effect(parse_operator(args.effect))
    return {"degree": degree_of_reality(s, e), "regular": is_regular(e)}, None


def cmd_classify(args):
    s, e = State(parse_operator(args.state)), Effect(parse_operator(args.effect))
    st = classify_property(s, e, args.eps)
    return {
        "status": st.status.value,
        "degree": st.degree,
        "approximately_real": st.approximately_real,
        "approximately_absent": st.approximately_absent,
    }, None


def cmd_decompose(args):
    e = Effect(parse_operator(args.effect))
    sharp = sharpness_report(e)
    res = {
        "spectral": [{"weight": w, "projection": complex_to_pairs(p.op)} for w, p in spectral_decompose_effect(e)],
        "is_sharp": sharp.is_sharp,
        "overlap_norm": sharp.overlap_norm,
        "regular": is_regular(e),
    }
    if args.ray:
        r = Projection(parse_operator(args.ray))
        beta, rp = qubit_nonorthogonal_decomposition(e, r)
        res["nonorthogonal"] = {
            "beta": beta,
            "r_prime": complex_to_pairs(rp.op),
            "overlap_r_rprime": float(np.real(np.trace(r.op @ rp.op))),
        }
    return res, None


def cmd_smear(args):
    if args.kind == "spin":
        pom = smear_discrete(spin_z_pom(), parse_matrix(args.matrix))
    else:
        qm = GridPositionMeasure(args.points, args.dx)
        bins = [list(range(k, min(k + args.bin_size, args.points))) for k in range(0, args.points, args.bin_size)]
        pom = smeared_position_pom(qm, parse_floats(args.kernel), bins)
    return {"pom": pom_to_dict(pom), "sharp": pom.is_sharp()}, None


def cmd_joint_qubit(args):
    a, b = parse_floats(args.a), parse_floats(args.b)
    res = construct_joint_qubit(a, b)
    out = {"feasible": res.feasible, "criterion": res.criterion, "gamma": res.gamma}
    if res.feasible:
        ma, mb = marginals(res.pom)
        ta, tb = unbiased_qubit_pom(a), unbiased_qubit_pom(b)
        out["pom"] = pom_to_dict(res.pom)
        out["marginal_error"] = max(
            float(np.max(np.abs(x.op - y.op))) for x, y in zip(ma.effects + mb.effects, ta.effects + tb.effects)
        )
    return out, None


def cmd_luders(args):
    s = State(parse_operator(args.state))
    if args.sharp:
        rec = luders_sharp(s, as_projection(Effect(parse_operator(args.effect))))
    else:
        rec = luders_general(s, Effect(parse_operator(args.effect)))
    return {
        "probability": rec.probability,
        "post_state": state_to_dict(rec.post_state),
        "trace_distance": rec.trace_distance,
    }, None


def _epr_shard(job):
    dim, eps, n, shard_seed = job
    rng = np.random.default_rng(shard_seed)
    out = []
    for _ in range(n):
        s, e = near_eigenstate_pair(dim, eps, rng)
        pr = epr_robustness_probe(s, e)
        out.append((pr.p_after - pr.p_before, pr.ratio))
    return out


def epr_jobs(dim, eps_grid, trials, seed):
    """Fixed shard layout; ``shard_seed = seed XOR shard_index``."""
    jobs, owner = [], []
    index = 0
    for k, eps in enumerate(eps_grid):
        for start in range(0, trials, EPR_SHARD_SIZE):
            jobs.append((dim, eps, min(EPR_SHARD_SIZE, trials - start), seed ^ index))
            owner.append(k)
            index += 1
    return jobs, owner


def cmd_epr_robustness(args):
    eps_grid = parse_floats(args.eps_grid)
    if args.dim < 2 or args.trials < 1 or any(not 0 < e < 1 for e in eps_grid):
        raise ValidationError("need dim >= 2, trials >= 1 and eps in (0, 1)")
    jobs, owner = epr_jobs(args.dim, eps_grid, args.trials, args.seed)
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            results = list(ex.map(_epr_shard, jobs))
    else:
        results = [_epr_shard(j) for j in jobs]
    merged = [[] for _ in eps_grid]
    for k, chunk in zip(owner, results):
        merged[k].extend(chunk)
    rows = []
    for eps, trials in zip(eps_grid, merged):
        gain = np.array([g for g, _ in trials])
        ratio = np.array([r for _, r in trials])
        rows.append((eps, len(trials), float(gain.min()), float(ratio.max()), float(ratio.mean())))
    summary = {
        "max_ratio": max(r[3] for r in rows),
        "min_probability_gain": min(r[2] for r in rows),
        "per_eps": [dict(zip(("eps", "trials", "min_gain", "max_ratio", "mean_ratio"), r)) for r in rows],
    }
    return summary, (["eps", "trials", "min_gain", "max_ratio", "mean_ratio"], rows)


def cmd_mb_sample(args):
    rng = np.random.default_rng(args.seed)
    if args.measure:
        mu = measure_from_dict(json.loads(Path(args.measure).read_text()))
    else:
        mu = random_measure(args.dim, args.atoms, rng)
    if args.effect:
        e = Effect(parse_operator(args.effect))
    else:
        u = random_unitary(mu.dim, rng)
        e = Effect((u * rng.uniform(0, 1, mu.dim)) @ u.conj().T)
    chk = mb_consistency_mc(mu, e, args.samples, rng)
    f = ClassicalEffectFn(e).values(mu.vectors())
    res = {
        "measure": measure_to_dict(mu),
        "effect": complex_to_pairs(e.op),
        "mc_estimate": chk.mc_estimate,
        "exact": chk.exact,
        "std_error": chk.std_error,
        "z_score": (chk.mc_estimate - chk.exact) / chk.std_error if chk.std_error > 0 else 0.0,
    }
    rows = [(i, w, fv) for i, (w, fv) in enumerate(zip(mu.weights, f))]
    return res, (["atom", "weight", "f_E"], rows)


def cmd_ray_geometry(args):
    g = ray_overlap_geometry(parse_ray(args.p), parse_ray(args.q))
    return g._asdict(), None


def cmd_chsh_scan(args):
    if args.steps < 1:
        raise ValidationError("steps must be >= 1")
    grid = np.linspace(args.eta_min, args.eta_max, args.steps)
    rows = [(eta, s, s > 2.0) for eta, s in chsh_unsharpness_scan(grid)]
    summary = {
        "s_max_at_eta_max": rows[-1][1],
        "violation_threshold": violation_threshold(),
        "violating_points": sum(r[2] for r in rows),
    }
    return summary, (["eta", "s_max", "violates"], rows)


def cmd_freq_operator(args):
    ns = [int(x) for x in parse_floats(args.n_values)]
    rows = []
    for n in ns:
        cf = frequency_operator_stats(args.p, n, "closed_form")
        tm = frequency_operator_stats(args.p, n, "tensor") if n <= MAX_TENSOR_N else None
        rows.append((n, cf.mean, cf.variance, "" if tm is None else tm.mean, "" if tm is None else tm.variance))
    agree = max((abs(r[2] - r[4]) for r in rows if r[4] != ""), default=0.0)
    return {"max_tensor_deviation": agree}, (["n", "mean", "variance", "tensor_mean", "tensor_variance"], rows)


def cmd_premeasure(args):
    res = premeasurement_demo(State(parse_operator(args.state)))
    return {
        "pointer_probabilities": res.pointer_probabilities,
        "schmidt_coefficients": res.schmidt_coefficients,
        "schmidt_rank": res.schmidt_rank,
        "post_state": state_to_dict(res.post_state),
    }, None


def cmd_track(args):
    fock = FockSpace(args.fock)
    alpha0 = _complex_arg(args.alpha0)
    pom = husimi_pom(fock, args.half_width, args.dq)
    rec = track_simulate(
        fock, alpha0, args.dynamics, args.omega, args.steps, args.dt, rng=args.seed, pom=pom, update=args.update
    )
    tubes = tube_report(rec, alpha0, args.dynamics, args.omega)
    summary = {
        "recorded_steps": len(rec),
        "halted": rec.halted,
        "halted_step": rec.params["halted_step"],
        "remainder_norm": pom.remainder_norm,
        "max_step_deviation": float(tubes["step_dev"].max()) if len(rec) else None,
        "fraction_in_step_tube": float(np.mean(tubes["step_dev"] <= 4.0)) if len(rec) else None,
        "max_deficit": float(rec.deficits.max()) if len(rec) else None,
    }
    return summary, (["t", "q", "p", "norm_deficit"], rec.rows())


COMMANDS = {
    "degree": cmd_degree,
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "smear": cmd_smear,
    "joint-qubit": cmd_joint_qubit,
    "luders": cmd_luders,
    "epr-robustness": cmd_epr_robustness,
    "mb-sample": cmd_mb_sample,
    "ray-geometry": cmd_ray_geometry,
    "chsh-scan": cmd_chsh_scan,
    "freq-operator": cmd_freq_operator,
    "premeasure": cmd_premeasure,
    "track": cmd_track,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser():
    parser = _Parser(prog="unsharp", description="Unsharp observables laboratory.")
    parser.add_argument("--version", action="version", version=f"unsharp {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
        return p

    p = add("degree", "degree of reality tr[rho E]")
    p.add_argument("--state", required=True)
    p.add_argument("--effect", required=True)

    p = add("classify", "actual / absent / indeterminate")
    p.add_argument("--state", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--eps", type=float, default=0.0)

    p = add("decompose", "spectral and non-orthogonal effect decompositions")
    p.add_argument("--effect", required=True)
    p.add_argument("--ray", default=None, help="rank-1 projection for the qubit decomposition")

    p = add("smear", "smeared spin or position POM")
    p.add_argument("--kind", choices=["spin", "position"], default="spin")
    p.add_argument("--matrix", default="0.9,0.2;0.1,0.8")
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--dx", type=float, default=0.1)
    p.add_argument("--kernel", default="0.25,0.5,0.25")
    p.add_argument("--bin-size", type=int, default=3)

    p = add("joint-qubit", "joint measurability of two unbiased qubit observables")
    p.add_argument("--a", required=True, help="Bloch vector x,y,z")
    p.add_argument("--b", required=True, help="Bloch vector x,y,z")

    p = add("luders", "Lüders update")
    p.add_argument("--state", required=True)
    p.add_argument("--effect", required=True)
    p.add_argument("--sharp", action="store_true")

    p = add("epr-robustness", "post-probability and disturbance for near-eigenstates")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--eps-grid", default="1e-4,1e-3,1e-2,1e-1")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)

    p = add("mb-sample", "Monte Carlo check of the ray-space representation")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--measure", default=None, help="measure JSON file")
    p.add_argument("--effect", default=None)

    p = add("ray-geometry", "overlap and operator-norm distance of two rays")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("chsh-scan", "optimal CHSH value against sharpness")
    p.add_argument("--eta-min", type=float, default=0.0)
    p.add_argument("--eta-max", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=21)

    p = add("freq-operator", "frequency operator statistics")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n-values", default="2,4,8,12")

    p = add("premeasure", "unitary premeasurement with a qubit pointer")
    p.add_argument("--state", required=True)

    p = add("track", "phase-space track simulation")
    p.add_argument("--alpha0", default="2")
    p.add_argument("--dynamics", choices=["none", "harmonic"], default="none")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--half-width", type=float, default=10.0)
    p.add_argument("--dq", type=float, default=0.25)
    p.add_argument("--fock", type=int, default=100)
    p.add_argument("--update", choices=["coherent", "luders"], default="coherent")
    return parser


def run(argv=None):
    """Parse ``argv``, execute, write artifacts; return the exit status."""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise ValidationError("no command given")
        out_dir = Path(args.out_dir or os.environ.get(OUTPUT_ENV) or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        results, table = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2

    params = {k: v for k, v in vars(args).items() if k not in ("command", "out_dir", "seed")}
    payload = {
        "tool_version": __version__,
        "command": args.command,
        "parameters": params,
        "seed": args.seed,
        "results": results,
    }
    if table is not None:
        header, rows = table
        write_csv(out_dir / f"{args.command}.csv", args.command, header, rows)
        payload["csv"] = f"{args.command}.csv"
    write_json(out_dir / f"{args.command}.json", payload)
    log.info("wrote %s", out_dir / f"{args.command}.json")
    return 0


def main():
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    sys.exit(run())
