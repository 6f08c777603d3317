"""drivebench: a 2D driving-safety testbed.

Generates safety-critical traffic (learned, gradient-based, and
trajectory-based adversaries), perturbs camera-style rasters with natural
corruptions and digital attacks, and scores driving policies with
system-level safety metrics.
"""

__version__ = "0.1.0"
