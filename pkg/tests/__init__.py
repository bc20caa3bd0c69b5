"""Tests for determination-depth."""
