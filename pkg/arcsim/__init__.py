"""
arcsim - first-order simulator for a quantum electron wavepacket exchanging
photons with a single quantized radiation mode.
"""

__version__ = "1.0.0"
