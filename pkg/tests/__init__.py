"""Tests for q2cert."""
