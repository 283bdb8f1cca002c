#include "bdris/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace bdris {

LsEstimate ls_matched_filter(std::span<const cplx> y, const TrainingDesign& td,
                             const SystemConfig& cfg) {
  if (y.size() != cfg.mr * cfg.t) throw DimensionError("ls_matched_filter: y length != mr * t");
  if (td.omega.rows() != cfg.t || td.omega.cols() != cfg.t_min())
    throw DimensionError("ls_matched_filter: omega shape does not match configuration");

  // C(r, j) = (nbar / t) sum_t Y(r, t) conj(omega(t, j)), with Y(r, t) = y[t * mr + r]
  const double scale = double(cfg.nbar) / double(cfg.t);
  const std::size_t cols = td.omega.cols();
  CVector c(cfg.mr * cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto om = td.omega.col(j);
    for (std::size_t t = 0; t < cfg.t; ++t) {
      const cplx w = std::conj(om[t]) * scale;
      for (std::size_t r = 0; r < cfg.mr; ++r) c[j * cfg.mr + r] += y[t * cfg.mr + r] * w;
    }
  }
  return {std::move(c)};
}

KrfEstimate krf_decouple(const LsEstimate& ls, const SystemConfig& cfg) {
  const std::size_t block = cfg.mr * cfg.mt * cfg.nbar * cfg.nbar;
  if (ls.c_hat.size() != block * cfg.q)
    throw DimensionError("krf_decouple: estimate length does not match configuration");

  const PermutationMap perm = kron_vec_permutation(cfg.mt, cfg.mr, cfg.nbar);
  const std::size_t rows = cfg.mr * cfg.nbar;
  const std::size_t cols = cfg.mt * cfg.nbar;

  KrfEstimate kr{CMatrix(cfg.mt, cfg.n), CMatrix(cfg.mr, cfg.n), {}};
  kr.sigmas.reserve(cfg.q);

  const std::span<const cplx> all(ls.c_hat);
  for (std::size_t grp = 0; grp < cfg.q; ++grp) {
    const CVector permuted = perm.apply(all.subspan(grp * block, block));
    const RankOne r1 = rank_one_approx(unvec(permuted, rows, cols));
    kr.sigmas.push_back(r1.sigma);
    if (r1.sigma == 0.0) continue;  // leave the group's factors at zero

    const double s = std::sqrt(r1.sigma);
    // vec(G^(q)) and vec(H^(q)) are contiguous column ranges of g_hat / h_hat
    auto g_dst = kr.g_hat.data().subspan(grp * cfg.nbar * cfg.mr, rows);
    auto h_dst = kr.h_hat.data().subspan(grp * cfg.nbar * cfg.mt, cols);
    std::transform(r1.u.begin(), r1.u.end(), g_dst.begin(), [s](cplx x) { return s * x; });
    std::transform(r1.v.begin(), r1.v.end(), h_dst.begin(),
                   [s](cplx x) { return s * std::conj(x); });
  }
  return kr;
}

CombinedChannel reconstruct_combined(const KrfEstimate& kr, const SystemConfig& cfg) {
  return combined_channel(cfg, ChannelPair{kr.h_hat, kr.g_hat});
}

double nmse(const CombinedChannel& truth, const CombinedChannel& estimate) {
  if (truth.c.size() != estimate.c.size()) throw DimensionError("nmse: shape mismatch");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < truth.c.size(); ++i) {
    err += std::norm(truth.c[i] - estimate.c[i]);
    ref += std::norm(truth.c[i]);
  }
  if (ref == 0.0) throw std::domain_error("nmse: reference channel is zero");
  return err / ref;
}

AlignedFactors resolve_ambiguity(const ChannelPair& truth, const KrfEstimate& kr,
                                 const SystemConfig& cfg) {
  AlignedFactors out{kr.h_hat, kr.g_hat, {}};
  out.lambdas.reserve(cfg.q);
  const std::size_t g_len = cfg.mr * cfg.nbar;
  const std::size_t h_len = cfg.mt * cfg.nbar;
  for (std::size_t grp = 0; grp < cfg.q; ++grp) {
    const auto g = truth.g.data().subspan(grp * g_len, g_len);
    const auto g_hat = kr.g_hat.data().subspan(grp * g_len, g_len);
    cplx inner{};
    double energy = 0.0;
    for (std::size_t i = 0; i < g_len; ++i) {
      inner += std::conj(g[i]) * g_hat[i];
      energy += std::norm(g[i]);
    }
    if (energy == 0.0) throw std::domain_error("resolve_ambiguity: zero true group block");
    const cplx lambda = inner / energy;
    out.lambdas.push_back(lambda);

    auto ga = out.g_aligned.data().subspan(grp * g_len, g_len);
    auto ha = out.h_aligned.data().subspan(grp * h_len, h_len);
    if (lambda == cplx{}) {
      // estimate orthogonal to the truth: nothing to align against
      continue;
    }
    for (auto& x : ga) x /= lambda;
    for (auto& x : ha) x *= lambda;
  }
  return out;
}

}  // namespace bdris
