#pragma once

// Combined-channel least squares (matched filter) and its Khatri-Rao
// factorization into per-group transmit/receive channel estimates.

#include "bdris/matcore.hpp"
#include "bdris/model.hpp"

#include <vector>

namespace bdris {

struct LsEstimate {
  CVector c_hat;
};

struct KrfEstimate {
  CMatrix h_hat;               // mt x n
  CMatrix g_hat;               // mr x n
  std::vector<double> sigmas;  // dominant singular value per group
};

// c_hat = (nbar / t) (omega (x) I_mr)^H y, computed as vec(Y conj(omega))
// with Y the mr x t reshape of y.
LsEstimate ls_matched_filter(std::span<const cplx> y, const TrainingDesign& td,
                             const SystemConfig& cfg);

// Per group: permute vec(H (x) G) into vec(H) (x) vec(G), reshape to the
// (mr nbar) x (mt nbar) matrix ~ g h^T and split its dominant singular
// triplet as g = sqrt(sigma) u, h = sqrt(sigma) conj(v). A group whose
// reshaped block is zero yields zero factors.
KrfEstimate krf_decouple(const LsEstimate& ls, const SystemConfig& cfg);

CombinedChannel reconstruct_combined(const KrfEstimate& kr, const SystemConfig& cfg);

// ||C - C_hat||_F^2 / ||C||_F^2
double nmse(const CombinedChannel& truth, const CombinedChannel& estimate);

struct AlignedFactors {
  CMatrix h_aligned;
  CMatrix g_aligned;
  std::vector<cplx> lambdas;
};

// Fixes the per-group scalar ambiguity against the true receive factor:
// lambda = g^H g_hat / ||g||^2, g_aligned = g_hat / lambda,
// h_aligned = h_hat * lambda. Diagnostic only.
AlignedFactors resolve_ambiguity(const ChannelPair& truth, const KrfEstimate& kr,
                                 const SystemConfig& cfg);

}  // namespace bdris
