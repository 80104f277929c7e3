"""
Bundled example problem files for polypareto.
"""
