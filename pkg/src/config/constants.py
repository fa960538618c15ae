"""Reference values reported for the post-beamforming GLRT detector.

Table rows carry the PD (in %) and the number of series terms reported for each
parameter set; figure anchors carry the quoted PD values read from the PD curves.
"""
from __future__ import annotations

DETECTORS = ("post_glrt", "pre_glrt", "square_law", "lrt")
METHODS = ("series", "quadrature", "foxh", "montecarlo", "closed_form")

# (M, PFA, Upsilon in dB, PD in %, number of terms)
TABLE1_CASES = (
    (50, 1e-8, -10.0, 0.106, 23),
    (80, 1e-8, -10.0, 1.416, 30),
    (100, 1e-8, -10.0, 4.423, 34),
    (50, 1e-8, -5.0, 19.224, 45),
    (50, 1e-6, -5.0, 52.886, 45),
    (50, 1e-4, -5.0, 87.958, 45),
    (50, 1e-6, -3.0, 92.089, 60),
    (50, 1e-6, -2.0, 98.621, 71),
    (50, 1e-6, -1.0, 99.902, 83),
)

# Quoted PD values: (name, M, N, PFA, SNR_n dB, {detector: PD})
FIGURE_ANCHORS = (
    ("roc_m22_n3_snr-7.9", 22, 3, 1e-4, -7.9, {"post_glrt": 0.53, "pre_glrt": 0.38, "square_law": 0.47}),
    ("roc_m22_n3_snr-6.5", 22, 3, 1e-4, -6.5, {"post_glrt": 0.78, "pre_glrt": 0.66, "square_law": 0.75}),
    ("roc_m22_n3_snr-5.1", 22, 3, 1e-4, -5.1, {"post_glrt": 0.94, "pre_glrt": 0.90, "square_law": 0.95}),
    ("antennas_m15_n10", 15, 10, 1e-6, -8.0, {"post_glrt": 0.55, "pre_glrt": 0.40, "square_law": 0.54}),
    ("antennas_m15_n14", 15, 14, 1e-6, -8.0, {"post_glrt": 0.79, "pre_glrt": 0.64, "square_law": 0.75}),
    ("antennas_m15_n18", 15, 18, 1e-6, -8.0, {"post_glrt": 0.94, "pre_glrt": 0.80, "square_law": 0.86}),
    ("samples_m10_n11", 10, 11, 1e-6, -8.0, {"post_glrt": 0.30, "pre_glrt": 0.21, "square_law": 0.35}),
    ("samples_m14_n11", 14, 11, 1e-6, -8.0, {"post_glrt": 0.53, "pre_glrt": 0.40, "square_law": 0.53}),
    ("samples_m18_n11", 18, 11, 1e-6, -8.0, {"post_glrt": 0.87, "pre_glrt": 0.73, "square_law": 0.82}),
    ("pfa_m10_n15_1e-6", 10, 15, 1e-6, -8.0, {"post_glrt": 0.93, "pre_glrt": 0.76, "square_law": 0.84}),
    ("pfa_m10_n15_1e-5", 10, 15, 1e-5, -8.0, {"post_glrt": 0.80, "pre_glrt": 0.57, "square_law": 0.70}),
    ("pfa_m10_n15_1e-4", 10, 15, 1e-4, -8.0, {"post_glrt": 0.55, "pre_glrt": 0.40, "square_law": 0.54}),
)

# Quoted SNR losses (dB) at PD = 0.8 against the LRT: (family, value, {detector: loss})
SNR_LOSS_ANCHORS = (
    ("n_antennas", 10, {"post_glrt": 3.8, "pre_glrt": 4.2, "square_law": 2.8}),
    ("n_antennas", 14, {"post_glrt": 2.9, "pre_glrt": 3.6, "square_law": 3.1}),
    ("n_antennas", 18, {"post_glrt": 2.8, "pre_glrt": 3.9, "square_law": 3.5}),
)
