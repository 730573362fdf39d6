"""vied: a software protection relay and its virtual fault test set.

Subpackages:
    codec       process-bus frame codecs (sampled values, GOOSE, redundancy)
    dsp         frequency tracking and phasor estimation
    protection  the six protection functions
    runtime     the relay daemon, station protocol server, CLI
    testkit     fault-waveform generation, latency campaigns, reporting
"""

__version__ = "0.1.0"
