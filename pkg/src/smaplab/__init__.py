"""smaplab: a numerical laboratory for 1-equivariant Schrodinger maps.

Core pieces: log-radial grids and the linearized operators (grid), the
harmonic-map family and its energy (soliton), the Coulomb-gauge dictionary
between maps and the reduced field (gauge), the distorted Fourier calculus of
H and Ht (spectral), split-step evolution of the reduced field (evolve), and
reproducible experiments (experiments, cli).
"""

__version__ = "0.1.0"
