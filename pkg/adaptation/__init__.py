# adaptation/__init__.py

"""
The methods under comparison and their diagnostics.
- baseline: no adaptation
- kmm: kernel mean matching re-weighting
- tca: transfer component analysis
- self_labeling: ISDA and Re-ISDA
- oracle: exhaustive optimum on tiny instances
- selection: multi-source model choice
"""

from adaptation.baseline import run_baseline
from adaptation.kmm import KmmConfig, kmm_weights, run_kmm
from adaptation.oracle import OracleResult, dp_exhaustive_oracle, dp_objective, total_loss
from adaptation.selection import select_source_model
from adaptation.self_labeling import (
    AdaptationConfig, IterationState, loss_trace, run_isda, run_re_isda,
    run_re_isda_ensemble, run_self_labeling,
)
from adaptation.tca import (
    TcaConfig, TcaModel, fit_tca, latent_coordinates, run_tca, subspace_mmd, tca_transform,
)
