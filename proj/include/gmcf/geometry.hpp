#pragma once

#include <vector>

#include "gmcf/manifold.hpp"
#include "gmcf/smallvec.hpp"
#include "gmcf/svd.hpp"

namespace gmcf {

/// Adapted orthonormal frames of the graph of a linear map with singular
/// values lambda_i: tangent vectors e_i and normal vectors e_alpha in the
/// product space R^{n+m}, with the diagonal convention
/// lambda_{i,alpha} = delta_{alpha, n+i} lambda_i.
struct GraphFrames {
    std::vector<Vec> tangent;  // n vectors, dim n+m
    std::vector<Vec> normal;   // m vectors, dim n+m
    std::vector<double> pi1_tangent_norms;  // |pi_1(e_i)| = 1/sqrt(1+lambda_i^2)
};

GraphFrames build_frames(const SingularValueData& svd);

/// Jacobian of the projection of the graph onto the base:
/// 1 / sqrt(prod_i (1 + lambda_i^2)).
double star_omega(const std::vector<double>& lambdas);

struct GraphCondition {
    double det_value;  // prod (1 + lambda_i^2) = det(g + f*h)
    double delta;      // 2 - det_value; > 0 means the hypothesis holds
};
GraphCondition graph_condition(const std::vector<double>& lambdas);

/// Second fundamental form of a graph from ambient derivative data.
/// first_derivs[i] and second_derivs[i][j] are the derivatives of the
/// embedding in coordinates where the ambient inner product is Euclidean
/// (flat chart, or an isometric embedding with curved-factor corrections
/// already applied by the caller). inverse_metric is Lambda^{ij}.
struct SffData {
    std::vector<std::vector<Vec>> b;  // B_ij, normal-valued, symmetric in ij
    double a2;  // |A|^2 = Lambda^{ik} Lambda^{jl} <B_ij, B_kl>
    double h2;  // |H|^2 = |Lambda^{ij} B_ij|^2
};

SffData second_fundamental_form(const std::vector<Vec>& first_derivs,
                                const std::vector<std::vector<Vec>>& second_derivs,
                                const Mat& inverse_metric);

/// Buffer-reusing variant for per-point loops.
void second_fundamental_form(const std::vector<Vec>& first_derivs,
                             const std::vector<std::vector<Vec>>& second_derivs,
                             const Mat& inverse_metric, SffData& out);

/// Components h_{alpha i j} of the second fundamental form in the adapted
/// frames: B evaluated on the normalized pushed-forward base vectors
/// e_i = F_*(a_i)/sqrt(1+lambda_i^2), paired against e_alpha. Valid in the
/// flat chart where frame vectors and coordinate directions coincide.
/// Index layout: h[alpha][i][j], alpha in 0..m-1 labelling e_{n+1+alpha}.
std::vector<std::vector<std::vector<double>>> sff_frame_components(
    const SffData& sff, const SingularValueData& svd, const GraphFrames& frames);

/// Curvature term of the *Omega evolution equation (without the *Omega
/// factor): sum_i lambda_i^2/(1+lambda_i^2) [ k1 sum_{j != i} 1/(1+lambda_j^2)
/// + k2 (1 - n + sum_{j != i} 1/(1+lambda_j^2)) ].
double curvature_term(const std::vector<double>& lambdas, const ManifoldSpec& spec);

/// Quadratic second-fundamental-form term of the *Omega evolution equation
/// (without the *Omega factor), in the adapted frames:
///   sum h^2 - 2 sum_{k, i<j} l_i l_j h_{n+i,ik} h_{n+j,jk}
///           + 2 sum_{k, i<j} l_i l_j h_{n+j,ik} h_{n+i,jk}.
/// h is indexed as in sff_frame_components; h_{n+i,..} with i > m is zero.
double quadratic_term(const SingularValueData& svd,
                      const std::vector<std::vector<std::vector<double>>>& h);

/// Q(x) = |x|^2 - 2 sum_{alpha,beta,i<j} (L_{i a} L_{j b} - L_{j a} L_{i b})
///        x_{i a} x_{j b}, for a general n x m matrix L (lambda(i, alpha))
/// and an n x m argument x.
double quadratic_form_Q(const Mat& lambda_matrix, const Mat& x);

}  // namespace gmcf
