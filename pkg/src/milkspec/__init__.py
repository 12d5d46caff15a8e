"""milkspec: chemometrics for milk quality assessment from visible and
hyperspectral imaging.

Subpackages: ``data`` (ENVI cubes, chemistry tables, dataset joins),
``imaging`` (visible-image descriptors), ``stats`` (correlations, ANOVA,
OLS diagnostics, PCA/MNF, LASSO, PLS), ``learn`` (classifiers, clustering,
metrics), plus ``figures``, ``pipeline`` and the ``cli`` entry point.
"""

__version__ = "0.1.0"
