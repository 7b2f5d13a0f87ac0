# Plot script templates
