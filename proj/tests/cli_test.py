"""End-to-end checks of the bidopt command line tool.

usage: cli_test.py BIDOPT DATA_DIR
"""

import json
import os
import subprocess
import sys
import tempfile

BIN, DATA = sys.argv[1], sys.argv[2]
failures = []


def run(*args):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    doc = json.loads(p.stdout) if p.returncode == 0 and p.stdout.strip() else None
    return p.returncode, doc, p.stderr


def data(name):
    return os.path.join(DATA, name)


def check(name, cond, extra=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({extra})" if extra and not cond else ""))
    if not cond:
        failures.append(name)


def close(a, b, rel=1e-9):
    return abs(a - b) <= rel * max(1.0, abs(b))


rc, doc, err = run("solve", "--instance", data("f1.json"))
check("solve f1", rc == 0 and close(doc["lower_bound"], 200) and close(doc["pure_cost"], 250)
      and close(doc["gap_bound"], 200 / 3), err)

rc, doc, err = run("solve", "--instance", data("f2.json"))
check("solve f2", rc == 0 and close(doc["lower_bound"], 375) and close(doc["pure_cost"], 475)
      and sorted(doc["prices"]) == [0.5, 5.0], err)

rc, _, err = run("solve", "--instance", data("f2_oversubscribed.json"))
check("oversubscribed instance exits 3", rc == 3 and "c1" in err, err)

rc, doc, err = run("build-groups", "--instance", data("criteria_overlap.json"))
check("three groups from overlapping criteria", rc == 0 and len(doc["groups"]) == 3, err)
rc, doc, err = run("build-groups", "--instance", data("criteria_identical.json"))
check("one group from identical criteria", rc == 0 and len(doc["groups"]) == 1, err)
rc, _, err = run("build-groups", "--instance", data("criteria_empty_universe.json"))
check("empty universe exits 2", rc == 2, err)

rc, doc, err = run("mixed", "--instance", data("f1.json"), "--auto-b1")
check("automatic mixed on f1", rc == 0 and close(doc["cost"], 200) and close(doc["lower_bound"], 200), err)
rc, doc, err = run("mixed", "--instance", data("f1.json"), "--delta", "0.01")
check("delta mixed on f1", rc == 0 and close(doc["cost"], 200), err)
rc, _, err = run("mixed", "--instance", data("f1.json"), "--delta", "0.01", "--auto-b1")
check("conflicting b1 options exit 2", rc == 2, err)

rc, doc, err = run("single", "--instance", data("f1.json"), "--b1", "1.0")
check("single with two-point mix", rc == 0 and close(doc["two_point"]["cost"], 200), err)

rc, doc, err = run("simulate", "--instance", data("f1.json"), "--strategy", "pure", "--seed", "7",
                   "--replications", "10")
ok = rc == 0 and all(abs(c["analytic"]["z_cost"]) < 3 and abs(c["analytic"]["z_impressions"]) < 3
                     for c in doc["campaigns"])
check("simulation agrees with analytic cost", ok, err)
rc2, doc2, _ = run("simulate", "--instance", data("f1.json"), "--strategy", "pure", "--seed", "7",
                   "--replications", "10")
check("simulation is reproducible", rc2 == 0 and doc2 == doc)

rc, doc, err = run("verify", "--instance", data("f3.json"), "--strategy", "pure")
check("f3 pure allocation verifies", rc == 0 and doc["verdict"] == "verified_optimal", err)
rc, doc, err = run("verify", "--instance", data("f1.json"), "--strategy", "pure")
check("step curves are not covered by the sufficient conditions",
      rc == 0 and doc["verdict"] == "not_applicable", err)
rc, doc, err = run("verify", "--instance", data("f2.json"), "--strategy", data("two_prices.json"))
check("non-component strategy", rc == 0 and doc["verdict"] == "not_component_structured", err)

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "solution.json")
    rc, _, err = run("solve", "--instance", data("f2.json"), "--out", out)
    with open(out) as f:
        solved = json.load(f)
    rc, doc, err = run("verify", "--instance", data("f2.json"), "--strategy", out)
    check("solution round-trips through verify", rc == 0 and doc["cost"] == solved["pure_cost"], err)

rc, _, err = run("solve", "--instance", data("unknown_field.json"))
check("unknown field exits 2", rc == 2, err)
rc, _, err = run("oracle", "--instance", data("f2.json"), "--max-states", "3")
check("oracle cap exits 4", rc == 4, err)
rc, doc, err = run("oracle", "--instance", data("f1.json"))
check("oracle on f1", rc == 0 and close(doc["cost"], 250), err)
rc, _, err = run("simulate", "--instance", data("f3.json"), "--strategy", "pure", "--seed", "1")
check("linear curves cannot be simulated", rc == 5, err)
rc, _, err = run("simulate", "--instance", data("f1.json"), "--strategy", "pure")
check("simulate requires a seed", rc == 2, err)

if failures:
    print(f"{len(failures)} failed")
    sys.exit(1)
