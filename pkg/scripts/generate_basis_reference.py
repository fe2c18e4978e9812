#!/usr/bin/env python3
"""Regenerate docs/operator_basis.txt, the numeric reference for the
single-site operator conventions used throughout the package."""

import os

from nematic_squeezing.algebra import basis_reference_text
from nematic_squeezing.experiments import atomic_write_text

here = os.path.dirname(os.path.abspath(__file__))
out = os.path.join(here, "..", "docs", "operator_basis.txt")
atomic_write_text(os.path.normpath(out), basis_reference_text())
print(f"wrote {os.path.normpath(out)}")
