"""Validate certificate documents against docs/certificate.schema.json."""
import json
import sys
from pathlib import Path

import jsonschema


def main(argv):
    schema = json.loads(Path(argv[1]).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    files = sorted(Path(argv[2]).glob("*.cert.json"))
    if not files:
        print("no certificates found", file=sys.stderr)
        return 1
    bad = 0
    for f in files:
        errors = list(validator.iter_errors(json.loads(f.read_text())))
        for e in errors[:3]:
            print(f"{f.name}: {e.json_path}: {e.message}", file=sys.stderr)
        bad += bool(errors)
    print(f"{len(files)} certificates, {bad} invalid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
