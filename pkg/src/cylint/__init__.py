"""cylint - integrable magnetic systems of cylindrical type: catalog, dynamics and verification."""

__version__ = "0.1.0"
__description__ = "Integrable magnetic systems of cylindrical type"
