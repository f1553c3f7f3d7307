"""Source package for CLI tools."""
