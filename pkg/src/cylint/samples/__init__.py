"""Sample parameter files for the catalog families."""
