"""Sparse colourful KKM solver with d-interval piercing and multi-cake division."""
