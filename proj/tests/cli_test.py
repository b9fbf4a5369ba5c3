# Exercises the evfleet executable: exit codes, artifacts, determinism.
import hashlib
import json
import os
import subprocess
import sys
import tempfile

EXE, DATA = sys.argv[1], sys.argv[2]
failures = []


def run(*args, env=None):
    p = subprocess.run([EXE, *args], capture_output=True, text=True, env=env)
    return p.returncode, p.stdout, p.stderr


def expect(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + ((" :: " + detail) if detail and not cond else ""))
    if not cond:
        failures.append(name)


def digest(path):
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if not k.endswith("_s") and k != "time"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


with tempfile.TemporaryDirectory() as tmp:
    inst = os.path.join(tmp, "k3.json")
    rc, out, err = run("validate", "--instance", os.path.join(tmp, "missing.file"))
    expect("validate missing file exits 2", rc == 2, err)
    expect("usage errors name their origin", "cli.main" in err, err)
    rc, _, _ = run()
    expect("no subcommand exits 2", rc == 2)
    rc, _, _ = run("run", "--bogus")
    expect("unknown flag exits 2", rc == 2)
    rc, _, _ = run("run", "--variant", "loose", "--instance", inst)
    expect("bad variant exits 2", rc == 2)

    rc, out, err = run("synth", "-K", "3", "--seed", "2", "--out", inst)
    expect("synth", rc == 0 and os.path.exists(inst), err)
    before = digest(inst)

    rc, out, _ = run("validate", "--instance", inst)
    expect("validate ok", rc == 0 and out.startswith("ok"), out)

    bad = os.path.join(tmp, "bad.json")
    with open(inst) as f:
        j = json.load(f)
    j["blocks"][0]["distance_km"] = 5000.0
    with open(bad, "w") as f:
        json.dump(j, f)
    rc, out, err = run("validate", "--instance", bad)
    expect("validate failing instance exits 1", rc == 1, out + err)
    expect("validate names the issue", "AssumptionViolation" in out, out)
    rc, _, err = run("run", "--instance", bad)
    expect("run on invalid instance exits 1", rc == 1, err)
    expect("domain errors name their origin", "fleet_domain" in err, err)

    reports = []
    for n in range(2):
        rep = os.path.join(tmp, "rep%d.json" % n)
        rc, out, err = run("run", "--instance", inst, "--variant", "surplus", "--with-p2",
                           "--gap", "1e-9", "--out", rep)
        expect("run %d" % n, rc == 0, err)
        with open(rep) as f:
            reports.append(strip_timing(json.load(f)))
        expect("run csv written", os.path.exists(os.path.join(tmp, "rep%d.csv" % n)))
    expect("run output deterministic up to timing", reports[0] == reports[1])
    expect("summary on stdout", "J1" in out and "gap41" in out, out)
    v = reports[0]["variants"][0]
    j1, j2 = v["P1"]["objective"], v["P2"]["objective"]

    orc = os.path.join(tmp, "oracle.json")
    rc, out, err = run("oracle", "--instance", inst, "--variant", "surplus", "--gap", "1e-9",
                       "--out", orc)
    expect("oracle", rc == 0, err)
    with open(orc) as f:
        o = json.load(f)["objective"]
    expect("oracle equals run's J2", abs(o - j2) <= max(1e-6 * abs(j2), 1e-4), "%r vs %r" % (o, j2))

    vb = os.path.join(tmp, "vb.json")
    rc, out, err = run("verify-bounds", "--instance", inst, "--gap", "1e-9", "--out", vb)
    expect("verify-bounds passes", rc == 0 and "FAIL" not in out, out + err)
    with open(vb) as f:
        expect("verify-bounds json", len(json.load(f)["verdicts"]) >= 8)

    a, b = os.path.join(tmp, "a.mps"), os.path.join(tmp, "b.mps")
    for which in ("p1", "p2"):
        run("emit-model", which, "--instance", inst, "--out", a)
        run("emit-model", which, "--instance", inst, "--out", b)
        expect("emit-model %s deterministic" % which, digest(a) == digest(b))
    rc, out, _ = run("emit-model", "p3", "--instance", inst, "--out", os.path.join(tmp, "p3.mps"))
    expect("emit-model p3 per type", rc == 0 and os.path.exists(os.path.join(tmp, "p3.i1.mps")))
    rc, _, _ = run("emit-model", "p4", "--instance", inst, "--slack", "1", "--format", "lp",
                   "--out", os.path.join(tmp, "p4.lp"))
    expect("emit-model p4 lp", rc == 0 and os.path.exists(os.path.join(tmp, "p4.lp")))
    rc, _, _ = run("emit-model", "p5", "--instance", inst, "--out", a)
    expect("emit-model unknown problem exits 2", rc == 2)

    csv = os.path.join(tmp, "sweep.csv")
    rc, out, err = run("sweep", "--instance", inst, "--omegas", "1,2", "--variants", "surplus,exact",
                       "--out", csv, "--plot-dir", os.path.join(tmp, "plots"))
    expect("sweep", rc == 0 and os.path.exists(csv), err)
    with open(csv) as f:
        expect("sweep rows", len(f.read().strip().splitlines()) == 5)
    expect("plot data", os.path.exists(os.path.join(tmp, "plots", "gap_vs_K.dat")))

    env = dict(os.environ, EVFLEET_HIGHS="/nonexistent/highs")
    rc, _, err = run("run", "--instance", inst, "--solver", "highs", env=env)
    expect("missing solver exits 3", rc == 3, err)
    expect("solver errors name their origin", "solver_backend" in err, err)

    gtfs_out = os.path.join(tmp, "g.json")
    rc, out, err = run("ingest", "--gtfs", os.path.join(DATA, "gtfs_blocks"), "--date", "20240304",
                       "--out", gtfs_out)
    expect("ingest", rc == 0 and "kept 2" in out, out + err)
    rc, _, err = run("ingest", "--gtfs", os.path.join(DATA, "gtfs_dangling"), "--date", "20240304",
                     "--out", gtfs_out)
    expect("ingest dangling exits 1", rc == 1 and "DanglingReference" in err, err)
    rc, _, _ = run("ingest", "--gtfs", os.path.join(DATA, "gtfs_blocks"), "--out", gtfs_out)
    expect("ingest without a day exits 2", rc == 2)

    k7 = os.path.join(tmp, "k7.json")
    run("synth", "-K", "7", "--out", k7)
    rc, _, err = run("oracle", "--instance", k7)
    expect("oracle guard exits 1", rc == 1 and "GuardExceeded" in err, err)

    expect("inputs untouched", digest(inst) == before)

print("%d failure(s)" % len(failures))
sys.exit(1 if failures else 0)
