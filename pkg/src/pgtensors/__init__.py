"""Exact finite-field tensor geometry.

Subpackages:
  gf        -- field tower arithmetic F_p <= F_q <= F_{q^n}
  cyclic    -- n x n matrix model for threefold tensors, semifield tests, BEL rank
  geom      -- the n=2 geometry of PG(3, q^2): forms, orbits, censuses, plane tables
  qh        -- quasi-Hermitian surface constructions and verification
  hermcount -- Hermitian rank spectra and exact zero counting
  fourfold  -- nonsingular 2x2x2x2 tensors via contraction pencils
  cli       -- command-line interface over the above
"""

__version__ = "0.1.0"
