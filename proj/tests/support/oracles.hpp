#pragma once

// Test-only oracles, independent of the library's computation paths:
// closed-form eigenvalues, determinants, the full-chart equivariant flow
// equation, and synthetic point clouds with known densities.

#include <cstdint>
#include <random>
#include <vector>

#include "gmcf/density.hpp"
#include "gmcf/smallvec.hpp"

namespace oracles {

/// Eigenvalues of a symmetric n x n matrix (n <= 3) from the characteristic
/// polynomial: quadratic formula for n = 2, trigonometric Cardano for n = 3.
/// Returned descending.
std::vector<double> sym_eigenvalues_closed_form(const gmcf::Mat& s);

/// Determinant by cofactor expansion (n <= 4).
double det_cofactor(const gmcf::Mat& s);

/// Full-chart graphical flow velocity for the equivariant ansatz on
/// S^n -> S^n in nested spherical coordinates: all Christoffel terms
/// assembled generically from the chart metric, no use of the reduced
/// formula. psi, dpsi, ddpsi are profile data at theta.
double full_chart_rhs(int n, double theta, double psi, double dpsi, double ddpsi);

/// Same assembly, but evaluated on a 2-D latitude-longitude grid with
/// central finite differences of the sampled map (n = 2 only). Returns the
/// theta'-component at node k of the theta grid (interior nodes).
double full_chart_rhs_fd(const std::vector<double>& psi_nodes, int k, double dtheta,
                         int phi_resolution);

/// Cloud sampling an n-plane through the origin (first n coordinates of
/// R^dim), extent [-half, half]^n, res points per axis.
gmcf::PointCloud plane_cloud(int n, int dim, double half, int res);

/// Round n-sphere of radius r in R^{n+1}, lat-long sampled, at time t.
gmcf::PointCloud sphere_cloud(int n, double r, int res, double t);

/// Density limit of the self-similarly shrinking n-sphere at its singular
/// spacetime point: omega_n (n / 2 pi)^{n/2} e^{-n/2}.
double shrinking_sphere_density(int n);

/// Apply a random rigid motion (rotation + translation) to a cloud and a
/// center point, consistently.
void random_rigid_motion(gmcf::PointCloud& cloud, std::vector<double>& y0,
                         std::uint64_t seed);

}  // namespace oracles
