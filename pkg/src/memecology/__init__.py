"""Track a lexicon of short phrases through a timestamped community corpus
and measure its ecology: normalized attention, diversity, lifespans,
peak dynamics and community innovation."""

__version__ = "0.1.0"
