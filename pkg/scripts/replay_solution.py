"""Replay a saved solution genotype.

Usage:
    python3 scripts/replay_solution.py xor results/xor_evolving/run_000_solution.txt
    python3 scripts/replay_solution.py dpb results/dpb_fixed/run_000_solution.txt [theta0_deg]
    python3 scripts/replay_solution.py grid results/dpb_generalize/run_000_solution.txt [steps]
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from neuroevo.genotype import Genotype
from neuroevo.network import CompiledNetwork
from neuroevo.tasks import DpbParams, generalization_test, xor_fitness
from neuroevo.tasks.cartpole import CartPoleState, dpb_episode


def describe(g: Genotype) -> None:
    print(
        f"genotype: {g.n_bias} bias, {g.n_input} inputs, {g.n_output} outputs, "
        f"{g.n_hidden} hidden; {len(list(g.feedforward_edges()))} feedforward + "
        f"{len(list(g.recurrent_edges()))} recurrent connections"
    )


def main(argv: list[str]) -> int:
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 1
    mode, path = argv[1], Path(argv[2])
    g = Genotype.from_text(path.read_text())
    describe(g)

    if mode == "xor":
        fitness, solved = xor_fitness(g)
        net = CompiledNetwork(g)
        net.reset()
        for inputs, target in (((0, 0), 0), ((0, 1), 1), ((1, 0), 1), ((1, 1), 0)):
            out = net.step([float(v) for v in inputs])[0]
            print(f"  {inputs} -> {out:+.4f} (classified {int(out > 0)}, target {target})")
        print(f"fitness {fitness:.4f}, solved={solved}")
    elif mode == "dpb":
        theta0 = math.radians(float(argv[3])) if len(argv) > 3 else math.radians(4.0)
        survived, _ = dpb_episode(g, CartPoleState(theta1=theta0), 100_000, DpbParams())
        print(f"balanced {survived}/100000 steps from theta1 = {math.degrees(theta0):.1f} deg")
    elif mode == "grid":
        steps = int(argv[3]) if len(argv) > 3 else 20_000
        passed, results = generalization_test(g, DpbParams(), steps)
        ok = sum(1 for r in results if r[3])
        print(f"grid: {ok}/99 conditions at {steps} steps, passed={passed}")
    else:
        print(f"unknown mode {mode!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
