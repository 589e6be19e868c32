"""Tests for cylint."""
