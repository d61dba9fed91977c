"""Run the acceptance suite and write a JSON summary."""

import argparse
import json
import time

from fermi_ee.acceptance import Context, run_acceptance


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--json", default="acceptance.json")
    args = p.parse_args()
    t0 = time.time()
    res = run_acceptance(Context(), progress=lambda r: print(r.line(), flush=True))
    with open(args.json, "w") as fh:
        json.dump([r.as_dict() for r in res], fh, indent=2, default=float)
    print(f"{sum(r.passed for r in res)}/{len(res)} passed in {time.time() - t0:.0f} s")


if __name__ == "__main__":
    main()
