import subprocess
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

from rulekit.javaparse import parse_java  # noqa: E402

CORPUS_DIR = TESTS_DIR / "fixtures" / "bankapp"
GOLDEN_DIR = TESTS_DIR / "fixtures" / "golden"
XPATH_ENGINE_DIR = TESTS_DIR / "xpath_engine"


def load_corpus():
    trees = []
    for f in sorted(CORPUS_DIR.rglob("*.java")):
        rel = f.relative_to(CORPUS_DIR).as_posix()
        tree, warnings = parse_java(f.read_text("utf-8"), rel)
        assert not warnings, f"unexpected parse warnings in {rel}"
        trees.append(tree)
    return trees


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def xpath_engine():
    """Path to the off-the-shelf XPath evaluator; installs its packages on
    first use."""
    if not (XPATH_ENGINE_DIR / "node_modules").is_dir():
        subprocess.run(
            ["npm", "install", "--no-audit", "--no-fund"],
            cwd=XPATH_ENGINE_DIR,
            check=True,
            capture_output=True,
        )
    return XPATH_ENGINE_DIR / "eval_xpath.js"
