"""Replay checker for saturation-prover refutations."""

from __future__ import annotations

__version__ = "0.1.0"
