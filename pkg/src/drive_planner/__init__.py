"""Desk-scale end-to-end driving planner trained with imitation and D-A3C."""

__version__ = "0.1.0"
