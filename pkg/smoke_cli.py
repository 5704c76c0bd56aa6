"""Scratch smoke for the CLI; delete before commit."""
import io
import json
import os
import sys
import tempfile
from contextlib import redirect_stdout, redirect_stderr
from fractions import Fraction

from sc_arrays.cli import main
from sc_arrays.presentation import (format_presentation_text,
                                    generate_family)

tmp = tempfile.mkdtemp(prefix="clismoke")


def path(name, text):
    p = os.path.join(tmp, name)
    with open(p, "w") as fh:
        fh.write(text)
    return p


def run(argv):
    out = io.StringIO()
    err = io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


f20 = path("f20.txt",
           format_presentation_text(generate_family(20).with_lambda(
               Fraction(1, 6))))
f140 = path("f140.txt", format_presentation_text(
    generate_family(140).with_lambda(Fraction(1, 33))))
free = path("free.txt", "gens: a b\nlambda: 1/33\n")
bad = path("bad.txt", "gens a b\nwhat\n")
z2 = path("z2.txt", "gens: a b\nlambda: 1/3\naba^-1b^-1\n")

# 1. check on the C'(1/6) fixture: pass, exit 0
code, out, err = run(["check", "--presentation", f20, "--mode", "relaxed"])
rep = json.loads(out)
assert code == 0, (code, err)
assert rep["verdict"] == "pass"
assert rep["checks"][0]["name"] == "cprime-pieces"
assert rep["checks"][0]["verdict"] == "pass"
print("check f20 ok")

# 2. P8-style: honest fail on a non-C'(1/6) presentation
p8 = path("p8.txt",
          format_presentation_text(generate_family(7).with_lambda(
              Fraction(1, 6))))
code, out, err = run(["check", "--presentation", p8, "--mode", "relaxed"])
rep = json.loads(out)
assert code == 1, (code, err)
assert rep["checks"][0]["verdict"] == "fail"
assert rep["checks"][0]["params"]["max_piece_length"] == 12
print("check p8 honest fail ok")

# 3. word route on the free presentation
code, out, err = run(["check", "--presentation", free, "--word", "abA"])
rep = json.loads(out)
assert code == 0, (code, err)
assert rep["word"]["is_identity"] is False
assert rep["word"]["route"] == "dehn"
code, out, err = run(["check", "--presentation", free, "--word", "abB A"])
rep = json.loads(out)
assert rep["word"]["is_identity"] is True
print("check --word ok")

# 4. malformed file: exit 2
code, out, err = run(["check", "--presentation", bad])
assert code == 2, (code, out, err)
assert "usage error" in err
code, out, err = run(["check", "--presentation",
                      os.path.join(tmp, "missing.txt")])
assert code == 2
print("usage errors ok")

# 5. unknown flag: exit 2 via argparse
code, out, err = run(["check", "--presentation", f20, "--frobnicate"])
assert code == 2, code
print("argparse exit ok")

# 6. ball command
code, out, err = run(["ball", "--presentation", f20, "--mode", "relaxed",
                      "--radius", "2", "--stats"])
rep = json.loads(out)
assert code == 0, (code, err)
assert rep["stats"]["backend"] in ("ball", "tree")
assert rep["stats"]["radius"] == 2
print("ball ok", rep["stats"]["backend"], rep["stats"].get("vertices"))

# 7. ball with dot dump on the commutator (unsafe fold route)
code, out, err = run(["ball", "--presentation", z2, "--mode", "relaxed",
                      "--radius", "2", "--unsafe-no-cprime", "--dump-dot"])
rep = json.loads(out)
assert code == 0, (code, err)
assert rep["dot"].startswith("digraph")
print("ball dot ok, folds", rep["stats"]["folds"])

# 8. word problem through the fold route
code, out, err = run(["check", "--presentation", z2, "--mode", "relaxed",
                      "--word", "abAB", "--unsafe-no-cprime",
                      "--radius", "2"])
rep = json.loads(out)
assert code == 0, (code, err)  # commutator passes C'(1/3): pieces are letters
assert rep["word"]["is_identity"] is True
assert rep["word"]["route"] == "fold"
print("fold-route word ok")

# 9. arrays on f140 in paper mode: xi/eta vanish at this radius
code, out, err = run(["arrays", "--presentation", f140, "--pair", "a,b",
                      "--radius", "3"])
rep = json.loads(out)
assert code == 0, (code, err)
assert rep["xi"] == {}
assert rep["eta_l1"] == {"exact": "2", "approx": 2.0}  # eta is 1 per edge
print("arrays paper ok")

# 10. arrays relaxed on the commutator
code, out, err = run(["arrays", "--presentation", z2, "--mode", "relaxed",
                      "--pair", "a,b", "--radius", "4",
                      "--unsafe-no-cprime"])
rep = json.loads(out)
assert code == 0, (code, err)
print("arrays relaxed ok: xi_l1", rep.get("xi_l1"), "eta_l1",
      rep.get("eta_l1"), "info", rep.get("informational"))

# 11. paper mode polices lambda
code, out, err = run(["arrays", "--presentation", z2, "--pair", "a,b",
                      "--radius", "4", "--unsafe-no-cprime"])
assert code == 2, (code, out, err)
print("paper-mode lambda police ok")

# 12. verify xi-drift on the free presentation: vacuous-ish pass, drift 0
code, out, err = run(["verify", "--suite", "xi-drift", "--presentation",
                      free, "--radius", "4"])
rep = json.loads(out)
assert code == 0, (code, err)
row = rep["checks"][0]
assert row["verdict"] == "pass", row
print("xi-drift free ok:", row["max_observed"], "pairs", row["pairs_tested"])

# 13. verify eta-drift paper mode on f140
code, out, err = run(["verify", "--suite", "eta-drift", "--presentation",
                      f140, "--radius", "4", "--max-pairs", "20"])
rep = json.loads(out)
assert code == 0, (code, err)
row = rep["checks"][0]
assert row["verdict"] == "pass", row
print("eta-drift f140 ok:", row["max_observed"])

# 14. verify phi on f140 paper mode
code, out, err = run(["verify", "--suite", "phi", "--presentation", f140,
                      "--radius", "3", "--max-pairs", "10"])
rep = json.loads(out)
assert code == 0, (code, err)
names = [r["name"] for r in rep["checks"]]
assert names == ["phi-nonnegative", "phi-symmetry", "phi-lower-bound",
                 "phi-drift"]
assert all(r["verdict"] == "pass" for r in rep["checks"]), rep["checks"]
print("phi suite ok")

# 15. verify ad-lemma on f20 relaxed
code, out, err = run(["verify", "--suite", "ad-lemma", "--presentation",
                      f20, "--mode", "relaxed", "--radius", "4",
                      "--max-pairs", "12"])
rep = json.loads(out)
assert code == 0, (code, err)
print("ad-lemma ok:", rep["checks"][0]["params"])

# 16. verify freeproduct
code, out, err = run(["verify", "--suite", "freeproduct", "--presentation",
                      free, "--seed", "7"])
rep = json.loads(out)
assert code == 0, (code, err)
assert all(r["verdict"] == "pass" for r in rep["checks"])
print("freeproduct suite ok")

# 17. verify embed on z2 relaxed (toy M needs explicit value >= 3)
code, out, err = run(["verify", "--suite", "embed", "--presentation", z2,
                      "--mode", "relaxed", "--N", "2", "--M", "3"])
rep = json.loads(out)
assert code in (0, 1), (code, err)
byname = {r["name"]: r for r in rep["checks"]}
assert byname["embed-basis-pieces"]["verdict"] == "pass", byname
assert byname["embed-psi-lengths"]["verdict"] == "pass"
print("embed suite (toy):",
      {k: v["verdict"] for k, v in byname.items()})

# 18. embed command writes the rewritten presentation
outp = os.path.join(tmp, "h.txt")
code, out, err = run(["embed", "--presentation", z2, "--mode", "relaxed",
                      "--N", "2", "--M", "3", "--output", outp])
rep = json.loads(out)
assert os.path.exists(outp)
with open(outp) as fh:
    text = fh.read()
assert text.startswith("gens:")
print("embed command ok; H file bytes:", len(text), "exit", code)

# 19. determinism: same config + seed -> byte-identical report
r1 = os.path.join(tmp, "r1.json")
r2 = os.path.join(tmp, "r2.json")
for rp in (r1, r2):
    code, out, err = run(["verify", "--suite", "phi", "--presentation",
                          f140, "--radius", "3", "--max-pairs", "10",
                          "--seed", "42", "--report", rp])
    assert code == 0, (code, err)
b1 = open(r1, "rb").read()
b2 = open(r2, "rb").read()
assert b1 == b2 and len(b1) > 100
print("determinism ok:", len(b1), "bytes")

# 20. different seed changes the sample (not necessarily the verdict)
code, out3, err = run(["verify", "--suite", "phi", "--presentation", f140,
                       "--radius", "3", "--max-pairs", "10", "--seed", "43"])
assert code == 0
print("seed variation ok")

print("ALL CLI SMOKE GREEN")
