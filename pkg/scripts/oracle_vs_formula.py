"""Compare the spectral-oracle trace with 2 U_alpha across (alpha, T); d = 1 ideal gas."""

import argparse
import time
from dataclasses import dataclass

from fermi_ee import boundary as B
from fermi_ee.oracle import converged_regularized_trace
from fermi_ee.thermodynamics import IdealGas


@dataclass(frozen=True)
class Config:
    mu: float = 1.0
    alphas: tuple = (0.5, 1.0, 2.0)
    temperatures: tuple = (0.05, 0.1, 0.5)
    rtol: float = 2e-3


def main(cfg: Config):
    gas, dom = IdealGas(d=1), B.Domain.intervals((0.0, 1.0))
    print("alpha,T,L,trace,two_U,rel_dev")
    t0 = time.time()
    for T in cfg.temperatures:
        res = converged_regularized_trace(gas, (T, cfg.mu), dom, list(cfg.alphas), rtol=cfg.rtol)
        for a in cfg.alphas:
            u2 = 2 * B.u_functional(a, B.fermi_profile(gas, T, cfg.mu), 1e-9)
            r = res[a]
            print(f"{a},{T},{r.L},{r.value:.10f},{u2:.10f},{abs(r.value / u2 - 1):.2e}")
    print(f"# elapsed {time.time() - t0:.1f} s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--mu", type=float, default=1.0)
    main(Config(mu=p.parse_args().mu))
