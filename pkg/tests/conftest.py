import json
from pathlib import Path
from typing import Callable, Dict

import pytest

from src.core import ContractAST, parse_file


TESTS_DIR = Path(__file__).parent
CORPUS_DIR = TESTS_DIR / "corpus"
REGRESSION_DIR = TESTS_DIR / "regression"
RECOGNITION_DIR = TESTS_DIR / "recognition"

RISKY = ("transfer", "destroy", "mint", "freeze", "pause", "param", "whitelist")
FIXED = tuple(f"fixed_{name}" for name in RISKY)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def expected_categories() -> Dict[str, list]:
    return json.loads((CORPUS_DIR / "expected.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def recognition_labels() -> Dict[str, dict]:
    return json.loads((RECOGNITION_DIR / "labels.json").read_text(encoding="utf-8"))


@pytest.fixture
def load() -> Callable[[str], ContractAST]:
    """Разбирает контракт корпуса или регрессионного набора по имени без расширения."""

    def loader(name: str) -> ContractAST:
        for directory in (CORPUS_DIR, REGRESSION_DIR, RECOGNITION_DIR):
            path = directory / f"{name}.msol"
            if path.exists():
                return parse_file(path)
        raise FileNotFoundError(name)

    return loader
