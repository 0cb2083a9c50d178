"""Low-discrepancy sequences and a MC / QMC / RQMC option-pricing benchmark."""
__version__ = "0.1.0"
