"""k-coverage sleep scheduling for dense sensor networks."""
