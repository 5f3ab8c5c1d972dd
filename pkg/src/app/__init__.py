from .cli import cli
from .reporting import (
    CorpusSummary,
    FileReport,
    RiskReport,
    exit_status,
)


__all__ = [
    "cli",
    "CorpusSummary",
    "FileReport",
    "RiskReport",
    "exit_status",
]
