#pragma once

#include <vector>

#include "gmcf/smallvec.hpp"

namespace gmcf {

/// Singular value decomposition of a map differential D: R^n -> R^m,
/// expressed in orthonormal frames of domain and target:
///   <D a_i, a_alpha> is diagonal with entries lambda_i >= 0, descending.
/// base_frame holds all n domain vectors (including null directions when
/// m < n); target_frame holds all m target vectors.
struct SingularValueData {
    std::vector<double> lambdas;  // min(n, m) entries, descending
    std::vector<Vec> base_frame;  // n orthonormal vectors in R^n
    std::vector<Vec> target_frame;  // m orthonormal vectors in R^m

    int n() const { return static_cast<int>(base_frame.size()); }
    int m() const { return static_cast<int>(target_frame.size()); }
    /// lambda_i with the zero-padding convention for i >= min(n, m).
    double lambda(int i) const {
        return i < static_cast<int>(lambdas.size()) ? lambdas[i] : 0.0;
    }
};

/// Decompose an m x n differential. Deterministic: cyclic Jacobi sweeps on
/// D^T D with a fixed (p, q) order, ties in the singular values broken by
/// the base vectors' largest-magnitude component, signs fixed so that every
/// base vector's largest component is positive and all lambda >= 0.
SingularValueData singular_decompose(const Mat& d);

/// Reconstruct sum_i lambda_i a_{alpha(i)} a_i^T; equals D up to roundoff.
Mat svd_reconstruct(const SingularValueData& svd);

}  // namespace gmcf
