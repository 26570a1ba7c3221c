# pipeline/__init__.py

"""
Pipeline orchestrators.
- experiment_pipeline: config → preprocessing → comparison / sweep → reports
- bundle: CSV benchmark bundles
- common: console banners
"""

from pipeline.bundle import Bundle, read_bundle, write_bundle
from pipeline.experiment_pipeline import ExperimentPipeline
