"""Multimodal video-game rating predictor.

Predicts a game's quality score class from its trailer (per-frame CNN
features) and summary (word indices), with three fusion architectures,
a from-scratch autodiff engine, and a 10-fold cross-validation harness.
"""

__version__ = "0.1.0"
