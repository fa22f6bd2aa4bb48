#pragma once

#include <vector>

#include "gmcf/smallvec.hpp"

namespace gmcf {

/// Nested spherical coordinates x = (x1, ..., xn) on the unit n-sphere:
///   y_1 = cos x1, y_k = cos x_k prod_{j<k} sin x_j, y_{n+1} = prod_j sin x_j,
/// with x1..x_{n-1} in (0, pi) and x_n in [0, 2 pi). The round metric is
/// diagonal: g_kk = prod_{j<k} sin^2 x_j.
namespace sphere_chart {

/// Diagonal metric coefficient g_kk at x (1-based component k in [0, n)).
double metric_diag(const double* x, int n, int k);

/// Christoffel symbol Gamma^k_{ij} of the round metric in these coordinates.
double christoffel(const double* x, int n, int k, int i, int j);

/// Embedding point in R^{n+1}.
Vec embed(const double* x, int n);

/// First derivatives d(embed)/dx_i, each a vector in R^{n+1}.
void embed_jacobian(const double* x, int n, std::vector<Vec>& dy);

/// Second derivatives d2(embed)/dx_i dx_j.
void embed_hessian(const double* x, int n, std::vector<std::vector<Vec>>& d2y);

/// Surface area of the unit n-sphere.
double unit_sphere_area(int n);

}  // namespace sphere_chart

}  // namespace gmcf
