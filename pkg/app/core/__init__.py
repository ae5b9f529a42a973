"""
Core module for application configuration and shared utilities.
"""