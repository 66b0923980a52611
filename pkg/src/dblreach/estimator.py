"""Estimator-style facade: fit on a graph, predict reachability for pairs.

Follows the scikit-learn parameter conventions (constructor stores
hyperparameters verbatim; ``get_params``/``set_params`` expose them; fitted
state lives in trailing-underscore attributes) so the index slots into
pipelines and model-selection tooling without depending on scikit-learn.
"""

from __future__ import annotations

import inspect

from .errors import NotFittedError
from .labels import IndexConfig, LandmarkStrategy, build_index
from .queries import DEFAULT_FLAGS, QueryFlags, QueryOutcome, query_batch
from .updates import UpdateStats, delete_edge, delete_vertex, insert_edge, insert_vertex
from .validation import as_dynamic_graph, check_pairs


class DblReachability:
    """Reachability oracle over a directed graph.

    Parameters mirror IndexConfig: ``k`` landmark bits, ``k_prime`` leaf
    buckets, ``strategy`` for landmark ranking, ``leaf_threshold`` for the
    generalized leaf rule, ``seed`` for leaf hashing, and ``workers`` for
    predict-time parallelism.
    """

    def __init__(self, k: int = 64, k_prime: int = 64, strategy: str = "product",
                 leaf_threshold: int = 0, seed: int = 0, workers: int = 1):
        self.k = k
        self.k_prime = k_prime
        self.strategy = strategy
        self.leaf_threshold = leaf_threshold
        self.seed = seed
        self.workers = workers

    # sklearn-compatible parameter plumbing ------------------------------

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "DblReachability":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    # fitting and prediction ---------------------------------------------

    def _config(self, n_vertices: int) -> IndexConfig:
        return IndexConfig(
            k=min(self.k, n_vertices),
            k_prime=self.k_prime,
            landmark_strategy=LandmarkStrategy(self.strategy),
            leaf_threshold=self.leaf_threshold,
            hash_seed=self.seed,
        )

    def fit(self, X, y=None) -> "DblReachability":
        """Build the index. X is a DynamicGraph or an iterable of edges."""
        graph = as_dynamic_graph(X)
        self.graph_ = graph
        self.index_ = build_index(graph, self._config(graph.vertex_count))
        self.n_vertices_ = graph.vertex_count
        return self

    def _require_fitted(self) -> None:
        if not hasattr(self, "index_"):
            raise NotFittedError(
                f"{type(self).__name__} is not fitted yet; call fit() first")

    def predict(self, X) -> list[bool]:
        """Reachability answers for an iterable of (source, target) pairs."""
        return [o.reachable for o in self.predict_outcomes(X)]

    def predict_outcomes(self, X, flags: QueryFlags = DEFAULT_FLAGS) -> list[QueryOutcome]:
        """Like predict, but returning full provenance per pair."""
        self._require_fitted()
        pairs = check_pairs(X, self.n_vertices_)
        outcomes, _ = query_batch(self.graph_, self.index_, pairs,
                                  workers=self.workers, flags=flags)
        return outcomes

    # incremental maintenance --------------------------------------------

    def insert_edge(self, u: int, v: int) -> UpdateStats:
        self._require_fitted()
        return insert_edge(self.graph_, self.index_, u, v)

    def delete_edge(self, u: int, v: int, rebuild_if_tainted: bool = False) -> UpdateStats:
        self._require_fitted()
        return delete_edge(self.graph_, self.index_, u, v,
                           rebuild_if_tainted=rebuild_if_tainted)

    def insert_vertex(self, out_edges=(), in_edges=()) -> UpdateStats:
        self._require_fitted()
        stats = insert_vertex(self.graph_, self.index_, out_edges, in_edges)
        self.n_vertices_ = self.graph_.vertex_count
        return stats

    def delete_vertex(self, v: int, rebuild_if_tainted: bool = False) -> UpdateStats:
        self._require_fitted()
        return delete_vertex(self.graph_, self.index_, v,
                             rebuild_if_tainted=rebuild_if_tainted)
