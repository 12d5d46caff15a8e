"""Model specification parsing and the fit/predict dispatch surface.

A ModelSpec is the JSON-friendly description used by the CLI config. The
documented keys per kind:

    knn:        k
    tree:       max_depth, min_leaf
    forest:     n_trees, max_depth, min_leaf, features_per_split, bootstrap, seed
    linear_svm: lam, epochs, seed
    mlp:        hidden, epochs, learning_rate, seed
"""

from __future__ import annotations

from dataclasses import dataclass, field

from milkspec.errors import ConfigError
from milkspec.learn.knn import KnnClassifier
from milkspec.learn.linear import LinearSvmClassifier
from milkspec.learn.mlp import MlpClassifier
from milkspec.learn.tree import DecisionTreeClassifier, RandomForestClassifier

KINDS = ("knn", "tree", "forest", "linear_svm", "mlp")

_ALLOWED_KEYS = {
    "knn": {"k"},
    "tree": {"max_depth", "min_leaf"},
    "forest": {"n_trees", "max_depth", "min_leaf", "features_per_split", "bootstrap", "seed"},
    "linear_svm": {"lam", "epochs", "seed"},
    "mlp": {"hidden", "epochs", "learning_rate", "seed"},
}


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r} (expected one of {KINDS})")
        unknown = set(self.params) - _ALLOWED_KEYS[self.kind]
        if unknown:
            raise ConfigError(
                f"unknown parameter(s) for {self.kind}: {', '.join(sorted(unknown))}"
            )

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelSpec":
        if "kind" not in raw:
            raise ConfigError("model spec needs a 'kind' key")
        params = {k: v for k, v in raw.items() if k != "kind"}
        if "hidden" in params:
            params["hidden"] = tuple(params["hidden"])
        return cls(kind=raw["kind"], params=params)

    def replace(self, **overrides) -> "ModelSpec":
        params = dict(self.params)
        params.update(overrides)
        return ModelSpec(self.kind, params)

    def build(self):
        try:
            if self.kind == "knn":
                return KnnClassifier(**self.params)
            if self.kind == "tree":
                return DecisionTreeClassifier(**self.params)
            if self.kind == "forest":
                return RandomForestClassifier(**self.params)
            if self.kind == "linear_svm":
                return LinearSvmClassifier(**self.params)
            return MlpClassifier(**self.params)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid {self.kind} parameters: {exc}") from exc


def fit_model(spec: ModelSpec, X, y):
    """Build the estimator described by ``spec`` and fit it."""
    model = spec.build()
    return model.fit(X, y)


def predict(model, X):
    return model.predict(X)
