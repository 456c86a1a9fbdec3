"""Tests for docpair package."""
