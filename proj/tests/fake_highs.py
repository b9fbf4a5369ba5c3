# Stand-in for the HiGHS command line binary: same flags, same raw solution file.
import sys

import highspy


def main(argv):
    args = dict(zip(argv[0::2], argv[1::2]))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    with open(args["--options_file"]) as f:
        for line in f:
            if "=" not in line:
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "write_solution_style":
                continue
            cur = h.getOptionValue(key)
            if isinstance(cur, tuple):
                cur = cur[-1]
            if isinstance(cur, bool):
                h.setOptionValue(key, value.lower() in ("1", "true", "on"))
            elif isinstance(cur, int):
                h.setOptionValue(key, int(float(value)))
            elif isinstance(cur, float):
                h.setOptionValue(key, float(value))
            else:
                h.setOptionValue(key, value)
    h.setOptionValue("time_limit", float(args["--time_limit"]))
    h.readModel(args["--model_file"])
    h.run()
    h.writeSolution(args["--solution_file"], 0)
    info = h.getInfo()
    status = h.modelStatusToString(h.getModelStatus())
    print("Model status        : " + status)
    if h.getLp().integrality_:
        print("  Dual bound        %.17g" % info.mip_dual_bound)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
