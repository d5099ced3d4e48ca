"""Tests for maximum-entropy fitting via the convex dual."""

import numpy as np
import pytest

from momentadapt.basis import make_tensor_basis
from momentadapt.densities import (
    ExpFamilyDensity,
    MomentVector,
    entropy,
    make_truncated_normal,
    moments,
    uniform_density,
)
from momentadapt.maxent import (
    InfeasibleMomentsError,
    epsilon_gap,
    fit_maxent,
    maxent_entropy,
    project,
)
from momentadapt.metrics import l1_distance


class TestFitMaxent:
    def test_zero_moments_give_uniform(self):
        basis = make_tensor_basis(3, 2)
        fit = fit_maxent(MomentVector(basis=basis, values=np.zeros(6)))
        np.testing.assert_allclose(fit.density.lam, np.zeros(6), atol=1e-12)

    def test_lambda_round_trip(self):
        """Moments of a family member recover its natural parameters."""
        rng = np.random.default_rng(0)
        for m in (2, 3, 5):
            basis = make_tensor_basis(m, 1)
            for _ in range(10):
                lam = rng.uniform(-0.5, 0.5, m)
                p = ExpFamilyDensity(basis=basis, lam=lam)
                fit = fit_maxent(moments(p, basis))
                np.testing.assert_allclose(fit.density.lam, lam, atol=1e-7)

    def test_residual_below_tolerance(self):
        basis = make_tensor_basis(3, 1)
        p = ExpFamilyDensity(basis=basis, lam=np.array([0.4, -0.3, 0.2]))
        fit = fit_maxent(moments(p, basis), tol=1e-11)
        assert fit.residual <= 1e-11

    def test_moments_of_fit_match_target(self):
        """The fitted density reproduces the requested moments."""
        basis = make_tensor_basis(2, 1)
        p = make_truncated_normal(0.4, 0.2)
        mu = moments(p, basis)
        fit = fit_maxent(mu)
        mu_fit = moments(fit.density, basis)
        np.testing.assert_allclose(mu_fit.values, mu.values, atol=1e-9)

    def test_truncated_normal_recovery(self):
        """A truncated normal is its own order-2 maxent density."""
        p = make_truncated_normal(0.45, 0.15)
        fit = fit_maxent(moments(p, make_tensor_basis(2, 1)))
        assert l1_distance(p, fit.density) <= 1e-6

    def test_product_split_matches_joint(self):
        """Per-dimension fits assemble into the joint product fit."""
        basis2 = make_tensor_basis(2, 2)
        p = ExpFamilyDensity(basis=basis2, lam=np.array([0.3, -0.2, 0.15, 0.1]))
        fit = fit_maxent(moments(p, basis2))
        basis1 = make_tensor_basis(2, 1)
        for j in range(2):
            f = ExpFamilyDensity(basis=basis1, lam=p.lam_dim(j))
            fit_j = fit_maxent(moments(f, basis1))
            np.testing.assert_allclose(fit.density.lam_dim(j), fit_j.density.lam, atol=1e-9)

    def test_boundary_moments_infeasible(self):
        """Moments at the feature cap lie outside the open moment space."""
        basis = make_tensor_basis(2, 1)
        mu = MomentVector(
            basis=basis, values=np.array([np.sqrt(3.0), np.sqrt(5.0)])
        )
        with pytest.raises(InfeasibleMomentsError):
            fit_maxent(mu)

    def test_invalid_inputs(self):
        basis = make_tensor_basis(2, 1)
        mu = MomentVector(basis=basis, values=np.zeros(2))
        with pytest.raises(ValueError):
            fit_maxent(mu, tol=0.0)


class TestProjectionFunctionals:
    def test_maxent_entropy_dominates(self):
        """h_phi(p) >= h(p) on assorted densities."""
        basis = make_tensor_basis(2, 1)
        for p in (
            uniform_density(1),
            make_truncated_normal(0.4, 0.2),
            make_truncated_normal(0.6, 0.12),
            ExpFamilyDensity(basis=make_tensor_basis(4, 1), lam=np.array([0.3, -0.2, 0.1, 0.05])),
        ):
            assert maxent_entropy(p, basis) >= entropy(p) - 1e-8

    def test_epsilon_gap_zero_for_family_members(self):
        basis = make_tensor_basis(3, 1)
        p = ExpFamilyDensity(basis=basis, lam=np.array([0.3, -0.2, 0.1]))
        assert epsilon_gap(p, basis) <= 1e-10

    def test_epsilon_gap_positive_outside_family(self):
        """A bimodal density is not order-2 maxent: strict entropy gap."""
        from momentadapt.densities import from_callable

        def bimodal(pts):
            x = pts[:, 0]
            return np.exp(-((x - 0.25) ** 2) / 0.005) + np.exp(
                -((x - 0.75) ** 2) / 0.005
            )

        p = from_callable(bimodal, 1)
        assert epsilon_gap(p, make_tensor_basis(2, 1)) > 1e-3

    def test_projection_idempotent(self):
        """Projecting a projection changes nothing."""
        basis = make_tensor_basis(2, 1)
        p = make_truncated_normal(0.35, 0.2)
        first = project(p, basis).density
        second = project(first, basis).density
        np.testing.assert_allclose(first.lam, second.lam, atol=1e-8)
