"""
Bundled data files for polypareto.
"""
