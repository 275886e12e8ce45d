"""Tests for framebound package."""
