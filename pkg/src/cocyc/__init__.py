"""Representative 1-cocycles of holes in 2D binary images.

The pipeline builds a dual graph pyramid over a binary image, selects a
cocycle basis at the reduced top level (one generator per hole of each
foreground object), and projects every generator down to pixel-resolution
crack sets.  An independent GF(2) linear-algebra oracle can verify every
claim the pipeline makes.
"""

__version__ = "0.1.0"
