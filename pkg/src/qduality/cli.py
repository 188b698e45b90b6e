"""Command-line front end: every verification is a subcommand with a JSON report.

Exit codes: 0 all checks pass, 1 input validation failure, 2 a check exceeded
its tolerance, 3 unsupported structure or unmet theorem hypothesis.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import correlations, duality, fixedpoints, randomgen, serialize
from .duality import BipartiteState, IsoPair, eigenbasis, iso_forward, iso_reverse
from .errors import (
    PreconditionError,
    QdualityError,
    UnsupportedStructureError,
    ValidationError,
)
from .qobjects import DensityOperator, KrausChannel, identity_channel, kraus_from_choi

_EPILOG = """\
verification map (claim -> subcommand):
  duality round trip (state, channel-on-support) <-> joint state   verify roundtrip
  parallel vs prepare-evolve-measure statistics agree               verify equivalence
  partial trace commutes with channel application                   verify trace-commute
  commuting measurement commutes with the duality map               verify measure-commute
  fixed operators form a direct sum of tensor-product blocks        fixed-points, decompose
  broadcasting two noncommuting fixed states forces clonable pairs  broadcast-demo
  post-selected joint states are pure and entangled on both wings   monogamy-demo
  cloning a nonorthogonal pure ensemble gives entangled pure duals  cloning-demo
  universal broadcasting <-> maximally entangled pure joint states  universal-demo
  joint-statistics Monte Carlo regression                           sample
"""


class _Run:
    """Collects loaded-file bytes, checks and outputs for one invocation."""

    def __init__(self, argv):
        self.argv = list(argv)
        self.digest = hashlib.sha256(json.dumps(self.argv).encode())
        self.checks = []
        self.extras = {}
        self.seed = None
        self.start = time.monotonic()

    def load(self, path):
        raw = Path(path).read_bytes()
        self.digest.update(raw)
        try:
            return json.loads(raw)
        except json.JSONDecodeError as err:
            raise ValidationError(
                f"malformed JSON in {path} at line {err.lineno} column {err.colno}: {err.msg}"
            ) from err

    def check(self, name, value, tolerance, larger_ok=False):
        ok = value >= tolerance if larger_ok else value <= tolerance
        self.checks.append(
            {
                "name": name,
                "value": float(value),
                "tolerance": float(tolerance),
                "pass": bool(ok),
            }
        )

    def report(self, command):
        return {
            "command": command,
            "inputsDigest": self.digest.hexdigest(),
            "checks": self.checks,
            "seed": self.seed,
            "elapsedMs": (time.monotonic() - self.start) * 1000.0,
            **self.extras,
        }


def _write_out(path, obj):
    if path:
        serialize.save(path, obj)


def _load_state(run, path) -> DensityOperator:
    return serialize.state_from_json(run.load(path))


def _load_channel(run, path) -> KrausChannel:
    return serialize.channel_from_json(run.load(path))


def _load_bipartite(run, path, da, db) -> BipartiteState:
    rho = _load_state(run, path)
    return BipartiteState(rho, (da, db))


def _cmd_iso(run, args):
    if args.mode == "forward":
        pair = IsoPair(_load_state(run, args.rho), _load_channel(run, args.channel))
        tau = iso_forward(pair)
        dev = np.max(np.abs(tau.marginal("A") - pair.rho.matrix.T))
        run.check("marginal_matches_transposed_input", dev, 1e-10)
        _write_out(args.out, serialize.matrix_to_json(tau.state.matrix))
    else:
        tau = _load_bipartite(run, args.tau, args.dimA, args.dimB)
        pair = iso_reverse(tau)
        back = iso_forward(pair)
        dev = np.max(np.abs(back.state.matrix - tau.state.matrix))
        run.check("reconstructed_joint_state", dev, args.tol)
        run.extras["supportRank"] = pair.support_rank
        _write_out(args.out_rho, serialize.state_to_json(pair.rho))
        _write_out(args.out_channel, serialize.channel_to_json(pair.channel))


def _cmd_std_iso(run, args):
    if args.mode == "forward":
        e = _load_channel(run, args.channel)
        tau = duality.std_iso_forward(e)
        if e.is_trace_preserving:
            marg = np.trace(tau.reshape(e.din, e.dout, e.din, e.dout), axis1=1, axis2=3)
            run.check(
                "maximally_mixed_marginal",
                np.max(np.abs(marg - np.eye(e.din) / e.din)),
                1e-10,
            )
        _write_out(args.out, serialize.matrix_to_json(tau))
    else:
        tau = _load_bipartite(run, args.tau, args.dimA, args.dimB)
        e = kraus_from_choi(tau.state.matrix * args.dimA, args.dimA, args.dimB)
        back = duality.std_iso_forward(e)
        run.check(
            "reconstructed_joint_state",
            np.max(np.abs(back - tau.state.matrix)),
            args.tol,
        )
        _write_out(args.out, serialize.channel_to_json(e))


def _cmd_verify(run, args):
    rng = randomgen.rng_from(args.seed)
    run.seed = args.seed
    worst = 0.0
    for _ in range(args.trials):
        if args.what == "roundtrip":
            pair = randomgen.random_iso_pair(args.dimA, args.dimB, rng)
            res = duality.verify_roundtrip(pair)
            worst = max(worst, res["rho_deviation"], res["channel_deviation"])
        elif args.what == "equivalence":
            pair = randomgen.random_iso_pair(args.dimA, args.dimB, rng)
            m = randomgen.random_povm(args.dimA, int(rng.integers(2, 6)), rng)
            n = randomgen.random_povm(args.dimB, int(rng.integers(2, 6)), rng)
            worst = max(worst, correlations.verify_equivalence(pair, m, n))
        elif args.what == "trace-commute":
            d1 = args.dimA
            d2 = args.dimB
            rho = randomgen.random_density(d1 * d2, rng)
            e = randomgen.random_channel(d1 * d2, d1 * d2, rng)
            res = duality.verify_trace_commute(rho, e, (d1, d2))
            worst = max(worst, res)
        else:  # measure-commute
            pair = randomgen.random_iso_pair(args.dimA, args.dimB, rng)
            basis = eigenbasis(pair.rho)
            m = randomgen.random_diagonal_povm(
                args.dimA, int(rng.integers(2, 5)), rng, basis=basis
            )
            outcome = int(rng.integers(len(m)))
            res = duality.verify_measure_commute(
                pair.rho, pair.channel, m, outcome, basis
            )
            worst = max(worst, res)
    run.check("max_deviation", worst, args.tol)
    run.extras["trials"] = args.trials


def _cmd_fixed_points(run, args):
    e = _load_channel(run, args.channel)
    space = fixedpoints.fixed_point_space(e)
    worst = max(
        float(np.max(np.abs(e(x) - x))) for x in space.basis
    ) if space.basis else 0.0
    run.check("basis_invariance", worst, 1e-9)
    run.extras["dim"] = space.dim


def _cmd_decompose(run, args):
    e = _load_channel(run, args.channel)
    blocks = fixedpoints.decompose_fixed_algebra(e)
    rng = randomgen.rng_from(0)
    worst = 0.0
    for block in blocks:
        for _ in range(5):
            mu = randomgen.random_density(block.d1, rng)
            lifted = block.embed(mu.matrix)
            worst = max(worst, float(np.max(np.abs(e(lifted) - lifted))))
    run.check("block_reconstruction", worst, 1e-8)
    run.extras["blocks"] = [{"d1": b.d1, "d2": b.d2} for b in blocks]
    run.extras["fixedSpaceDim"] = sum(b.d1 * b.d1 for b in blocks)


def _demo_channels(run, args, dim):
    e1 = _load_channel(run, args.channel1) if args.channel1 else identity_channel(dim)
    e2 = _load_channel(run, args.channel2) if args.channel2 else identity_channel(dim)
    return e1, e2


def _cmd_broadcast(run, args):
    s1 = _load_state(run, args.sigma1)
    s2 = _load_state(run, args.sigma2)
    e1, e2 = _demo_channels(run, args, s1.dim)
    w = fixedpoints.broadcast_obstruction(s1, s2, e1, e2)
    run.check("witness_overlap_above_zero", w.overlap, 1e-8, larger_ok=True)
    run.check("witness_overlap_below_one", w.overlap, 1 - 1e-8)
    v1, v2 = w.clonable_states
    for name, vec in (("witness1", v1), ("witness2", v2)):
        full = w.block.embed(np.outer(vec, np.conj(vec)))
        dev = max(
            float(np.max(np.abs(ch(full) - full))) for ch in (e1, e2)
        )
        run.check(f"{name}_fixed_by_both_channels", dev, 1e-8)
    run.extras["blockIndex"] = w.block_index
    run.extras["overlap"] = w.overlap


def _cmd_monogamy(run, args):
    s1 = _load_state(run, args.sigma1)
    s2 = _load_state(run, args.sigma2)
    e1, e2 = _demo_channels(run, args, s1.dim)
    result = fixedpoints.monogamy_demo(args.p, s1, s2, e1, e2)
    run.checks.extend(result["checks"])
    run.extras["results"] = result["results"]


def _cmd_cloning(run, args):
    ens = serialize.ensemble_from_json(run.load(args.ensemble))
    e1, e2 = _demo_channels(run, args, ens.dim)
    result = fixedpoints.cloning_demo(ens, e1, e2)
    run.checks.extend(result["checks"])
    run.extras["results"] = result["results"]


def _cmd_universal(run, args):
    if args.direction == "a":
        if not (args.channel1 and args.channel2):
            raise ValidationError("direction a needs --channel1 and --channel2")
        e1 = _load_channel(run, args.channel1)
        e2 = _load_channel(run, args.channel2)
        result = fixedpoints.universal_from_channels(e1, e2)
    else:
        if not (args.tau1 and args.tau2):
            raise ValidationError("direction b needs --tau1 and --tau2")
        t1 = _load_bipartite(run, args.tau1, args.dimA, args.dimB)
        t2 = _load_bipartite(run, args.tau2, args.dimA, args.dimB)
        result = fixedpoints.universal_from_states(t1, t2)
    run.checks.extend(result["checks"])
    run.extras["verdict"] = result["verdict"]
    if not result["verdict"] and all(c["pass"] for c in result["checks"]):
        run.extras["verdictNote"] = "not universal-broadcasting evidence"


def _cmd_sample(run, args):
    table = serialize.table_from_json(run.load(args.table))
    run.seed = args.seed
    rep = correlations.sample(table, args.trials, args.seed)
    run.check("tv_distance", rep.tv_distance, args.tol)
    run.extras["counts"] = [[int(c) for c in row] for row in rep.counts]
    run.extras["trials"] = rep.trials


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qduality",
        description="Channel-state duality toolkit: verify, decompose, demo.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iso", help="state-dependent channel/state duality map")
    p.add_argument("mode", choices=["forward", "reverse"])
    p.add_argument("--rho")
    p.add_argument("--channel")
    p.add_argument("--tau")
    p.add_argument("--dimA", type=int)
    p.add_argument("--dimB", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.add_argument("--out-rho")
    p.add_argument("--out-channel")
    p.set_defaults(func=_cmd_iso)

    p = sub.add_parser("std-iso", help="standard channel/state duality map")
    p.add_argument("mode", choices=["forward", "reverse"])
    p.add_argument("--channel")
    p.add_argument("--tau")
    p.add_argument("--dimA", type=int)
    p.add_argument("--dimB", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_std_iso)

    p = sub.add_parser("verify", help="randomized property suites")
    p.add_argument(
        "what",
        choices=["roundtrip", "equivalence", "trace-commute", "measure-commute"],
    )
    p.add_argument("--dimA", type=int, default=2)
    p.add_argument("--dimB", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("fixed-points", help="dimension of the invariant-operator space")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("decompose", help="tensor-product block structure of fixed points")
    p.add_argument("--channel", required=True)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("broadcast-demo", help="clonable witness from broadcasting")
    p.add_argument("--sigma1", required=True)
    p.add_argument("--sigma2", required=True)
    p.add_argument("--channel1")
    p.add_argument("--channel2")
    p.set_defaults(func=_cmd_broadcast)

    p = sub.add_parser("monogamy-demo", help="pure entangled post-selected factors")
    p.add_argument("--sigma1", required=True)
    p.add_argument("--sigma2", required=True)
    p.add_argument("--channel1")
    p.add_argument("--channel2")
    p.add_argument("--p", type=float, default=0.5)
    p.set_defaults(func=_cmd_monogamy)

    p = sub.add_parser("cloning-demo", help="entangled pure duals from a cloned ensemble")
    p.add_argument("--ensemble", required=True)
    p.add_argument("--channel1")
    p.add_argument("--channel2")
    p.set_defaults(func=_cmd_cloning)

    p = sub.add_parser("universal-demo", help="universal broadcasting equivalence")
    p.add_argument("--direction", choices=["a", "b"], required=True)
    p.add_argument("--channel1")
    p.add_argument("--channel2")
    p.add_argument("--tau1")
    p.add_argument("--tau2")
    p.add_argument("--dimA", type=int)
    p.add_argument("--dimB", type=int)
    p.set_defaults(func=_cmd_universal)

    p = sub.add_parser("sample", help="seeded Monte Carlo joint-statistics regression")
    p.add_argument("--table", required=True)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=0.02)
    p.set_defaults(func=_cmd_sample)

    return parser


_VERIFY_DEFAULT_TOL = {
    "roundtrip": 1e-9,
    "equivalence": 1e-10,
    "trace-commute": 1e-9,
    "measure-commute": 1e-9,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", 0) is None:
        args.tol = _VERIFY_DEFAULT_TOL[args.what]
    run = _Run(argv)
    try:
        args.func(run, args)
    except (UnsupportedStructureError, PreconditionError) as err:
        print(f"unsupported structure: {err}", file=sys.stderr)
        return 3
    except (ValidationError, QdualityError, OSError) as err:
        print(f"invalid input: {err}", file=sys.stderr)
        return 1
    sub = getattr(args, "mode", None) or getattr(args, "what", None)
    rep = run.report(args.command + (f" {sub}" if sub else ""))
    print(serialize.dumps(rep), end="")
    return 0 if all(c["pass"] for c in run.checks) else 2


if __name__ == "__main__":
    sys.exit(main())
