"""
Larger scale tests to ensure all the pieces work together.
"""