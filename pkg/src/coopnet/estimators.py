"""scikit-learn style front-ends.

Each estimator takes a :class:`~coopnet.network.Network` (or a path to a
network file, or its decoded JSON) as ``X``. Hyper-parameters live in
``__init__`` so ``get_params``/``set_params``/``clone`` work as usual.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cuts import DEFAULT_REL_TOL, analyze_flow, multicast_dof
from .errors import MissingCoefficientError, NetworkValidationError
from .galois import DeterministicNetwork, lift_network
from .network import Network, embed_wireline, load_network, network_from_dict, sample_coefficients, validate
from .outage import estimate_diversity, simulate_outage


def check_network(X: Any, *, require_coefficients: bool = False, embed: bool = True) -> Network:
    """Coerce ``X`` to a validated :class:`Network`.

    Accepts a Network, a path, or a decoded JSON mapping. Wireline-flagged
    inputs are embedded first unless ``embed`` is false.
    """
    if isinstance(X, (str, Path)):
        net = load_network(X)
    elif isinstance(X, dict):
        net = network_from_dict(X)
    elif isinstance(X, Network):
        net = X
    else:
        raise TypeError(f"expected a Network, a path or a mapping, got {type(X).__name__}")
    if embed and net.wireline:
        net = embed_wireline(net)
    report = validate(net)
    if not report.ok:
        raise NetworkValidationError(report)
    if require_coefficients and not net.has_all_coefficients:
        raise MissingCoefficientError("every edge needs a coefficient")
    return net


def multicast_groups(net: Network) -> dict[str, list[str]]:
    """Sources that feed two or more sinks, with those sinks in order."""
    groups: dict[str, list[str]] = {}
    for s, t in net.declared_flows:
        groups.setdefault(s, []).append(t)
    return {s: ts for s, ts in groups.items() if len(ts) > 1}


class FlowAnalyzer(TransformerMixin, BaseEstimator):
    """Min-cut diversity and DOF for every declared flow.

    Absent coefficients are sampled with ``seed`` before the rank
    computations. ``transform`` returns one ``[diversity, dof]`` row per flow
    of the network it is given.
    """

    def __init__(self, rel_tol: float = DEFAULT_REL_TOL, seed: int = 0, sampler: str = "gaussian"):
        self.rel_tol = rel_tol
        self.seed = seed
        self.sampler = sampler

    def _analyze(self, X):
        net = sample_coefficients(check_network(X), self.seed, self.sampler)
        return net, [analyze_flow(net, s, t, self.rel_tol) for s, t in net.declared_flows]

    def fit(self, X, y=None):
        net, self.analyses_ = self._analyze(X)
        self.network_ = net
        self.multicast_dof_ = {
            s: multicast_dof(net, s, sinks, self.rel_tol) for s, sinks in multicast_groups(net).items()
        }
        return self

    def transform(self, X):
        check_is_fitted(self, "analyses_")
        _, analyses = self._analyze(X)
        return np.array([[a.min_cut_value, a.dof] for a in analyses], dtype=int)


class NetworkLifter(TransformerMixin, BaseEstimator):
    """Certified finite-field lift of a network.

    ``fit`` draws the field coefficients; ``transform`` attaches them to any
    network with the same topology.
    """

    def __init__(self, seed: int = 0, max_attempts: int = 20, prime: int | None = None, rel_tol: float = DEFAULT_REL_TOL):
        self.seed = seed
        self.max_attempts = max_attempts
        self.prime = prime
        self.rel_tol = rel_tol

    def fit(self, X, y=None):
        net = check_network(X, require_coefficients=True)
        dn, cert = lift_network(net, self.seed, self.max_attempts, rel_tol=self.rel_tol, prime=self.prime)
        self.deterministic_network_ = dn
        self.certificate_ = cert
        self.p_ = dn.p
        return self

    def transform(self, X) -> DeterministicNetwork:
        check_is_fitted(self, "deterministic_network_")
        net = check_network(X)
        fitted = self.deterministic_network_
        shape = [(e.tail_antenna, e.head_antenna) for e in net.edges]
        if shape != [(e.tail_antenna, e.head_antenna) for e in fitted.network.edges]:
            raise ValueError("network topology differs from the one the lifter was fitted on")
        return DeterministicNetwork(net, fitted.p, fitted.q, fitted.xi)


class OutageDiversityEstimator(BaseEstimator):
    """Simulated outage curves and diversity slopes for every declared flow."""

    def __init__(
        self,
        rate: float = 1.0,
        snr_grid_db=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0),
        trials: int = 10**5,
        seed: int = 0,
        estimator: str = "importance",
        window_db=None,
        workers: int = 1,
    ):
        self.rate = rate
        self.snr_grid_db = snr_grid_db
        self.trials = trials
        self.seed = seed
        self.estimator = estimator
        self.window_db = window_db
        self.workers = workers

    def fit(self, X, y=None):
        net = check_network(X)
        self.curves_ = {}
        self.diversity_ = {}
        for s, t in net.declared_flows:
            curve = simulate_outage(
                net, s, t, self.rate, self.snr_grid_db, self.trials, self.seed, self.estimator, self.workers
            )
            self.curves_[(s, t)] = curve
            self.diversity_[(s, t)] = estimate_diversity(curve, self.window_db)
        return self

    def predict(self, X=None):
        """Estimated diversity slope per flow, in declared-flow order."""
        check_is_fitted(self, "diversity_")
        return np.array([d.slope for d in self.diversity_.values()])
