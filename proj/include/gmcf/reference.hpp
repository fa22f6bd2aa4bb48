#pragma once

#include "gmcf/flow_torus.hpp"
#include "gmcf/geometry.hpp"
#include "gmcf/grid.hpp"

namespace gmcf::ref {

/// Serial reference implementations of the torus kernels. These are written
/// directly on top of the pointwise geometry API, one grid point at a time,
/// with no fusion or scratch reuse. They exist to pin down the optimized
/// OpenMP kernels in flow_torus.cpp and as the baseline for the benchmark.

/// Derivatives of the lift at one grid point (central differences).
struct PointStencil {
    Mat d;                                // m x n map differential
    std::vector<std::vector<Vec>> d2;     // n x n second derivatives, m comps
};

PointStencil point_stencil(const GridMap& map, const std::vector<int>& idx);

/// Full per-point geometry through the public API.
struct PointData {
    Mat lambda, lambda_inv;
    double det = 0, omega = 0, energy = 0;
    double a2 = 0, h2 = 0;
    Vec rhs;    // m
    Vec drift;  // n
};

PointData point_data(const GridMap& map, const std::vector<int>& idx);

/// Reference field computation: same contract as gmcf::compute_fields.
void compute_fields(const GridMap& map, double t, FieldSet& f);

/// Reference forward-Euler step.
void apply_step(GridMap& map, const FieldSet& f, double dt);

}  // namespace gmcf::ref
