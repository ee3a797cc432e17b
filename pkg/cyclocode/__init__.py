"""Low-correlation sequence codebooks from cyclotomic plans over prime fields"""

__version__ = "0.1.0"
