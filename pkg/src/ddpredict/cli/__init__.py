"""Command-line workbench: generate, extract, train, evaluate, report."""

from ddpredict.cli.main import main

__all__ = ["main"]
