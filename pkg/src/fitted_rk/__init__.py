"""Fitted reproducing-kernel solver for third-order periodic BVPs on [0, 1]."""
__version__ = "0.1.0"
