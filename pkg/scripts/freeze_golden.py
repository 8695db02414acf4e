#!/usr/bin/env python3
"""Regenerate tests/golden/demo/ from a defaults run on the bundled corpus.

Run this only after an intentional behavior change, then review the diff.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from citemap.pipeline import PipelineConfig, builtin_corpus_path, run_pipeline

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "tests" / "golden" / "demo"

if __name__ == "__main__":
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as scratch:
        paths = run_pipeline(PipelineConfig(corpus=str(builtin_corpus_path("demo")), out_dir=scratch))
        for name, path in sorted(paths.items()):
            if name == "manifest.json":
                continue  # embeds the output directory path
            shutil.copyfile(path, GOLDEN_DIR / name)
            print(f"froze {GOLDEN_DIR / name}")
