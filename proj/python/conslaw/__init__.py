"""Exact conservation law computations for PDE systems and their potential systems."""

from ._core import ConslawError, System, corpus_names, euler, load, load_file, run_corpus

__all__ = ["ConslawError", "System", "corpus_names", "euler", "load", "load_file", "run_corpus"]
