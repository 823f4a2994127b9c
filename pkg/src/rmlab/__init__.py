"""RM values of theta-cocycles, p-adic Eisenstein families, and Gross-Stark
unit recognition at desk scale."""

__version__ = "0.1.0"
