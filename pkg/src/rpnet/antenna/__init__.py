"""Distributed antenna selection driven by net transitions."""
