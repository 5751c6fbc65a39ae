"""Marchetype tests."""
