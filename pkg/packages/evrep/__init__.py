"""evrep library package."""
