"""Shared helpers for entbounds tests"""
