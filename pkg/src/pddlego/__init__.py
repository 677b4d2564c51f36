"""Agents that build and edit PDDL problem files while exploring text games."""

__version__ = "0.1.0"
