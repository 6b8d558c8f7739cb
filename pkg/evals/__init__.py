"""Acceptance runs for monopole-lab."""
