"""Tests for entbounds.core"""
