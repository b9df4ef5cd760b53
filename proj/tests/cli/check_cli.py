#!/usr/bin/env python3
#
# Copyright 2026 The Nanoscope Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""End-to-end checks of CLI exit codes, determinism and output placement."""

import argparse
import filecmp
import json
import os
import pathlib
import subprocess
import sys
import tempfile

failures = 0


def run(cli, *args, cwd=None, env=None):
  return subprocess.run([cli, *map(str, args)], capture_output=True, text=True,
                        cwd=cwd, env=env)


def expect(label, condition, detail=""):
  global failures
  if condition:
    print(f"ok   {label}")
  else:
    failures += 1
    print(f"FAIL {label} {detail}")


def expect_code(label, result, code):
  expect(f"{label} exits {code}", result.returncode == code,
         f"(got {result.returncode}: {result.stderr.strip()[:300]})")


def same_tree(a, b):
  names_a = sorted(p.name for p in a.iterdir())
  names_b = sorted(p.name for p in b.iterdir())
  if names_a != names_b:
    return False
  return all(filecmp.cmp(a / n, b / n, shallow=False) for n in names_a)


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument("--cli", required=True)
  parser.add_argument("--population", required=True)
  args = parser.parse_args()
  cli = os.path.abspath(args.cli)
  pop = os.path.abspath(args.population)

  with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    work = tmp / "cwd"
    work.mkdir()

    fit1 = tmp / "fit1"
    r = run(cli, "fit", "--population", pop, "--strategy", "lp,random",
            "--bootstrap", 200, "--workers", 1, "--out", fit1, cwd=work)
    expect_code("fit defaults", r, 0)
    fit4 = tmp / "fit4"
    r = run(cli, "fit", "--population", pop, "--strategy", "lp,random",
            "--bootstrap", 200, "--workers", 4, "--out", fit4, cwd=work)
    expect_code("fit with 4 workers", r, 0)
    expect("fit outputs byte-identical across worker counts", same_tree(fit1, fit4))
    report = json.loads((fit1 / "report.json").read_text())
    expect("fit report has 8 rows", len(report["rows"]) == 8)
    expect("fit wrote quantile vectors",
           (fit1 / "quantiles_lp_q90.csv").exists() and
           (fit1 / "quantiles_random_q50.csv").exists())

    r = run(cli, "fit", "--population", pop, "--floor", 20, "--bootstrap", 50,
            "--out", tmp / "fit20", cwd=work)
    expect_code("fit above the floor limit", r, 3)
    expect("floor error names the quantile", "Q=" in r.stderr, r.stderr)

    expect_code("unknown strategy",
                run(cli, "fit", "--population", pop, "--strategy", "popular",
                    "--out", tmp / "x", cwd=work), 1)
    expect_code("missing flag", run(cli, "fit", "--population", pop, cwd=work), 1)
    expect_code("bad quantile",
                run(cli, "fit", "--population", pop, "--quantiles", "0",
                    "--out", tmp / "x", cwd=work), 1)
    expect_code("missing population",
                run(cli, "stats", "--population", tmp / "absent", cwd=work), 2)
    expect_code("unknown user",
                run(cli, "risk", "--population", pop, "--user", 999999,
                    "--out", tmp / "x", cwd=work), 2)

    sims = []
    for workers in (1, 3):
      out = tmp / f"sim{workers}"
      r = run(cli, "simulate", "--population", pop, "--interests", "1,3,5",
              "--targets", 200, "--seed", 4, "--workers", workers, "--out", out,
              cwd=work)
      expect_code(f"simulate with {workers} worker(s)", r, 0)
      sims.append(out)
    expect("simulate outputs byte-identical", same_tree(*sims))

    batch = tmp / "batch.jsonl"
    batch.write_text('{"target": 1, "strategy": "lp", "n_interests": 3}\n'
                     '{"target": 2, "strategy": "random", "seed": 5, '
                     '"n_interests": 12}\n')
    r = run(cli, "simulate", "--population", pop, "--batch", batch,
            "--gate-max-interests", 9, "--out", tmp / "batch", cwd=work)
    expect_code("simulate batch", r, 0)
    lines = (tmp / "batch" / "campaigns.csv").read_text().splitlines()
    expect("batch gate rejects 12 interests",
           len(lines) == 3 and lines[2].endswith(",max_interests"), lines)

    gen_a, gen_b = tmp / "gen_a", tmp / "gen_b"
    for out in (gen_a, gen_b):
      expect_code("generate calibrated",
                  run(cli, "generate", "--calibrated", "--users", 300, "--seed", 9,
                      "--out", out, cwd=work), 0)
    expect("generate is reproducible", same_tree(gen_a, gen_b))
    regen = tmp / "regen"
    expect_code("generate from written config",
                run(cli, "generate", "--config", gen_a / "config.txt", "--out", regen,
                    cwd=work), 0)
    expect("config file round-trips",
           (regen / "users.jsonl").read_bytes() == (gen_a / "users.jsonl").read_bytes())

    expect("nothing written to the working directory", not any(work.iterdir()),
           list(work.iterdir()))

  print(f"{failures} failure(s)")
  return 1 if failures else 0


if __name__ == "__main__":
  sys.exit(main())
