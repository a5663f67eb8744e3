"""Validates the gallery documents and the reports randopt writes for them
against the published JSON schemas."""

import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--randopt", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--gallery", required=True, type=pathlib.Path)
    ap.add_argument("--workdir", required=True, type=pathlib.Path)
    args = ap.parse_args()

    def validator(name):
        schema = json.loads((args.schemas / name).read_text())
        cls = jsonschema.validators.validator_for(schema)
        cls.check_schema(schema)
        return cls(schema)

    problem = validator("problem.schema.json")
    report = validator("report.schema.json")
    args.workdir.mkdir(parents=True, exist_ok=True)

    failures = 0
    checked_docs = set()
    for line in (args.gallery / "MANIFEST").read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        command, document, expected = line.split()
        doc_path = args.gallery / document
        if document not in checked_docs:
            checked_docs.add(document)
            doc = json.loads(doc_path.read_text())
            errors = list(problem.iter_errors(doc))
            # documents that exist to trigger semantic input errors still
            # have to be schema-valid; the errors are caught by randopt itself
            for e in errors:
                print(f"FAIL {document}: {e.json_path}: {e.message}")
                failures += 1
        out = args.workdir / f"{doc_path.stem}.{command}.json"
        proc = subprocess.run([args.randopt, command, "--input", str(doc_path), "--output", str(out)],
                              capture_output=True)
        rep = json.loads(out.read_text())
        errors = list(report.iter_errors(rep))
        for e in errors:
            print(f"FAIL report {command} {document}: {e.json_path}: {e.message}")
            failures += 1
        if rep["exit_code"] != proc.returncode or proc.returncode != int(expected):
            print(f"FAIL {command} {document}: exit {proc.returncode}, report says {rep['exit_code']}, "
                  f"expected {expected}")
            failures += 1
        if not errors:
            print(f"ok   {command} {document}")
    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
