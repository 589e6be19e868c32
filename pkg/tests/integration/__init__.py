"""End-to-end tests of the cylint command line."""
