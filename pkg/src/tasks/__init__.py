from .app import app
from .analysis_worker import analyze_contract, check_contract_theorems


__all__ = [
    "app",
    "analyze_contract",
    "check_contract_theorems",
]
