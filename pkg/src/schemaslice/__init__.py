"""Slicing of program schemas under Herbrand semantics."""
