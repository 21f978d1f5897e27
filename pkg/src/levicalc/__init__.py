"""levicalc - calculus of random integral mappings on infinitely divisible laws."""

__version__ = "0.1.0"
