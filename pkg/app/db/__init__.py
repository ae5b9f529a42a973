"""
Results-store declarative base.
"""
