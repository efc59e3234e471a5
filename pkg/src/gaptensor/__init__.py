"""Gap-amplifying graph tensor toolkit."""
