"""Core implementation modules."""
