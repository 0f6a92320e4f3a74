"""Synchronous radio network simulator."""
