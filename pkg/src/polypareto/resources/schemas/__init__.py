"""
Report JSON-Schema documents for polypareto.
"""
