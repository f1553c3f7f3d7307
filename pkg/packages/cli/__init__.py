"""CLI package for evrep."""
