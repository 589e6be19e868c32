"""Tests for cylint utility modules."""
