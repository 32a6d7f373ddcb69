"""stlfix: convert arbitrary STL triangle collections into printable solids.

The pipeline preserves every volume-bounding surface exactly and thickens
visible zero-thickness sheets and wires by the minimum amount the target
printer can fabricate.
"""

__version__ = "0.1.0"
