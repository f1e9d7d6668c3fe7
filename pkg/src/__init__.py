# Modular group subgroup toolkit
__version__ = "0.1.0"
