"""Tests for the cylint family catalog."""
