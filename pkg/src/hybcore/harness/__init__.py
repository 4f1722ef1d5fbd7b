"""Corpus, conformance checking, random programs, reports and the CLI."""
