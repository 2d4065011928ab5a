#!/usr/bin/env python3
"""Solve an LP/MIP file with HiGHS and print a JSON summary."""
import argparse
import json
import sys

import highspy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("lp")
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.lp) != highspy.HighsStatus.kOk:
        print(json.dumps({"status": "read_error"}))
        return 1
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    out = {
        "status": status,
        "objective": h.getInfo().objective_function_value,
        "runtime_s": h.getRunTime(),
    }
    print(json.dumps(out))
    return 0 if status == "Optimal" else 2


if __name__ == "__main__":
    sys.exit(main())
