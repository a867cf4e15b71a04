"""Unit tests for the NCCW diagonal engine."""
