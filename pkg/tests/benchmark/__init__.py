"""
Tests with a time limit.
"""