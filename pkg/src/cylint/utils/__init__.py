"""Shared helpers: function grammar, finite differences, parameter files."""
