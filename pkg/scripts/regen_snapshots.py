#!/usr/bin/env python3
"""Rewrite the corpus snapshots from the current implementation.

Run only after checking that a numeric change is intended; the snapshot
diff is the review artifact.
"""

import json
from pathlib import Path

import polyalaw
from polyalaw.corpus import load_corpus, snapshot_of
from polyalaw.report import analyze

target = Path(polyalaw.__file__).parent / "corpus" / "expected.json"
snapshots = {}
for e in load_corpus():
    snapshots[e.name] = snapshot_of(analyze(e.equation, order=e.order).to_dict())
    print(e.name, snapshots[e.name]["verdict"], snapshots[e.name]["C"])
target.write_text(json.dumps(snapshots, indent=2) + "\n")
print(f"wrote {target}")
