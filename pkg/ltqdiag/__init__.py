"""Fault-diagnosis toolkit for the locally twisted cube LTQ_n."""

__version__ = "0.1.0"
