# preprocessing/__init__.py

"""
Data preparation stages.
- normalize: max-min scaling
- pca: covariance PCA
- sequence: frame differencing and target ordering
- calibration: calibration-point choice
"""

from preprocessing.calibration import choose_calibration
from preprocessing.normalize import MinMaxParams, minmax_apply, minmax_fit
from preprocessing.pca import PcaParams, pca_apply, pca_fit, pca_inverse
from preprocessing.sequence import frame_difference, grouped_frame_difference, order_targets
