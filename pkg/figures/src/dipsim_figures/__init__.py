"""Figure scripts for dipsim CSV outputs; one module per figure kind."""

__version__ = "0.1.0"
