# core/__init__.py

"""Core: configuration, errors, logging helpers and run tracking."""
