"""Validate CLI JSON output against the published schemas.

usage: validate_json.py SCHEMA_DIR FILE...
Each file is matched to <command>.schema.json, or error.schema.json when it
holds an error object.
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    schema_dir = pathlib.Path(sys.argv[1])
    schemas = {p.name: json.loads(p.read_text()) for p in schema_dir.glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(body)) for name, body in schemas.items())
    failed = 0
    for path in sys.argv[2:]:
        doc = json.loads(pathlib.Path(path).read_text())
        name = "error.schema.json" if "error" in doc else f"{doc.get('command')}.schema.json"
        if name not in schemas:
            print(f"{path}: no schema {name}")
            failed += 1
            continue
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"{path}: {list(e.path)}: {e.message}")
        failed += bool(errors)
        if not errors:
            print(f"{path}: ok ({name})")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
