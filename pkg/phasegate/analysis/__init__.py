"""Gate diagnostics, spectra and speed-limit estimates."""
