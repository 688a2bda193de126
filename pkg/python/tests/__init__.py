"""Test suite for the qsrelax package."""
