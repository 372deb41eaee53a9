#!/usr/bin/env python3
"""Validate every JSON report the CLI can emit against the published schema.

usage: validate_reports.py SHAPLEY_BIN SCHEMA TOY_MODEL_BIN
"""
import json
import subprocess
import sys
import tempfile

import jsonschema


def run(binary, *args):
    out = subprocess.run([binary, *args], check=True, capture_output=True,
                         text=True).stdout
    return json.loads(out)


def main():
    binary, schema_path, toy = sys.argv[1:4]
    with open(schema_path) as fh:
        schema = json.load(fh)
    validator = jsonschema.Draft202012Validator(schema)

    reports = []
    for model in ("ishigami", "sobol-g", "plate-buckling", "constant"):
        for estimator in ("shapley", "shapley-winding", "main", "total"):
            reports.append(run(binary, "analyze", "--model", model,
                               "--estimator", estimator, "--n", "64",
                               "--seed", "3"))
    for model in ("ishigami", "sobol-g", "constant"):
        reports.append(run(binary, "exact", "--model", model))

    with tempfile.NamedTemporaryFile("w", suffix=".json") as cfg:
        json.dump({"model": {"name": "external", "command": f"'{toy}' echo",
                             "dim": 2},
                   "n": 16, "seed": 1}, cfg)
        cfg.flush()
        reports.append(run(binary, "analyze", "--config", cfg.name))

    failures = 0
    for report in reports:
        errors = list(validator.iter_errors(report))
        for err in errors:
            failures += 1
            print(f"{report['command']} {report['config']['model']['name']}: "
                  f"{err.message} at {list(err.absolute_path)}")
    print(f"validated {len(reports)} reports, {failures} schema errors")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
