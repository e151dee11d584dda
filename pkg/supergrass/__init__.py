"""Syzygies of determinantal varieties and cohomology of super Grassmannians."""

__version__ = "1.0.0"
