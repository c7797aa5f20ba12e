"""Cooperative Gaussian interference channel outer bounds."""
