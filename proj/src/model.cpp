#include "bdris/model.hpp"

#include <cmath>
#include <numbers>

namespace bdris {

void SystemConfig::validate() const {
  if (mt == 0 || mr == 0 || n == 0 || nbar == 0 || q == 0 || t == 0)
    throw ConfigError("all dimensions must be >= 1");
  if (n != nbar * q)
    throw ConfigError("n (" + std::to_string(n) + ") must equal nbar * q (" +
                      std::to_string(nbar) + " * " + std::to_string(q) + ")");
  if (t < t_min())
    throw ConfigError("pilot length t = " + std::to_string(t) + " is below mt * nbar^2 * q = " +
                      std::to_string(t_min()));
  if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
}

SystemConfig SystemConfig::make(std::size_t mt, std::size_t mr, std::size_t n, std::size_t nbar,
                                 double snr_db, std::size_t t) {
  if (nbar == 0 || n % nbar != 0)
    throw ConfigError("group size " + std::to_string(nbar) + " does not divide n = " +
                      std::to_string(n));
  SystemConfig cfg;
  cfg.mt = mt;
  cfg.mr = mr;
  cfg.n = n;
  cfg.nbar = nbar;
  cfg.q = n / nbar;
  cfg.t = t == 0 ? cfg.t_min() : t;
  cfg.snr_db = snr_db;
  cfg.validate();
  return cfg;
}

double noise_variance(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

namespace {

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
void fill_gaussian(std::span<cplx> out, double variance, RandomStream& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (auto& z : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = {re, im};
  }
}

}  // namespace

ChannelPair generate_channels(const SystemConfig& cfg, RandomStream& rng) {
  ChannelPair ch{CMatrix(cfg.mt, cfg.n), CMatrix(cfg.mr, cfg.n)};
  fill_gaussian(ch.h.data(), 1.0, rng);
  fill_gaussian(ch.g.data(), 1.0, rng);
  return ch;
}

TrainingDesign build_training(const SystemConfig& cfg) {
  cfg.validate();
  const std::size_t tmin = cfg.t_min();
  if (cfg.t % tmin != 0)
    throw ConfigError("pilot length t = " + std::to_string(cfg.t) +
                      " is not a whole multiple of t_min = " + std::to_string(tmin));

  const std::size_t nbar = cfg.nbar;
  const std::size_t block_len = nbar * nbar;
  const CMatrix pilots = dft_matrix(cfg.mt);
  const auto basis = weyl_heisenberg_basis(nbar);

  TrainingDesign td;
  td.x = CMatrix(cfg.mt, cfg.t);
  td.s_bar = CMatrix(block_len * cfg.q, cfg.t);
  td.s_seq.resize(cfg.t);

  for (std::size_t slot = 0; slot < cfg.t; ++slot) {
    std::size_t idx = slot % tmin;
    const std::size_t k = idx % nbar;
    idx /= nbar;
    const std::size_t p = idx % nbar;
    idx /= nbar;
    const std::size_t g = idx % cfg.q;
    const std::size_t m = idx / cfg.q;

    auto xcol = td.x.col(slot);
    for (std::size_t a = 0; a < cfg.mt; ++a) xcol[a] = pilots(a, m);

    const CMatrix& unit = basis[k * nbar + p];
    auto& blocks = td.s_seq[slot];
    blocks.reserve(cfg.q);
    for (std::size_t grp = 0; grp < cfg.q; ++grp) {
      const double phase =
          -2.0 * std::numbers::pi * double((grp * g) % cfg.q) / double(cfg.q);
      blocks.push_back(unit * std::polar(1.0, phase));
      const auto& blk = blocks.back();
      std::copy(blk.data().begin(), blk.data().end(),
                td.s_bar.col(slot).begin() + static_cast<std::ptrdiff_t>(grp * block_len));
    }
  }

  td.omega = khatri_rao(td.s_bar, td.x).transpose();
  return td;
}

CVector synthesize_rx(const SystemConfig& cfg, const ChannelPair& ch, const TrainingDesign& td,
                      RandomStream& rng) {
  if (td.x.rows() != cfg.mt || td.x.cols() != cfg.t || td.s_seq.size() != cfg.t ||
      ch.h.rows() != cfg.mt || ch.g.rows() != cfg.mr || ch.h.cols() != cfg.n ||
      ch.g.cols() != cfg.n)
    throw DimensionError("synthesize_rx: inconsistent dimensions");

  std::vector<CMatrix> h_groups, g_groups;
  for (std::size_t grp = 0; grp < cfg.q; ++grp) {
    h_groups.push_back(ch.h_group(grp, cfg.nbar));
    g_groups.push_back(ch.g_group(grp, cfg.nbar));
  }

  CVector y(cfg.mr * cfg.t);
  for (std::size_t slot = 0; slot < cfg.t; ++slot) {
    const auto x = td.x.col(slot);
    for (std::size_t grp = 0; grp < cfg.q; ++grp) {
      // G S H^T x, right to left
      CVector hx(cfg.nbar);
      const CMatrix& h = h_groups[grp];
      for (std::size_t j = 0; j < cfg.nbar; ++j)
        for (std::size_t a = 0; a < cfg.mt; ++a) hx[j] += h(a, j) * x[a];
      const CVector shx = td.s_seq[slot][grp] * hx;
      const CVector yq = g_groups[grp] * shx;
      for (std::size_t r = 0; r < cfg.mr; ++r) y[slot * cfg.mr + r] += yq[r];
    }
  }

  const double var = noise_variance(cfg.snr_db);
  if (var > 0.0) {
    CVector noise(y.size());
    fill_gaussian(noise, var, rng);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += noise[i];
  }
  return y;
}

CVector apply_combined_pilot(const CMatrix& omega, std::span<const cplx> c, std::size_t mr) {
  if (mr == 0 || c.size() != mr * omega.cols())
    throw DimensionError("apply_combined_pilot: length mismatch");
  return vec(unvec(c, mr, omega.cols()) * omega.transpose());
}

CombinedChannel combined_channel(const SystemConfig& cfg, const ChannelPair& ch) {
  CombinedChannel out;
  out.c.reserve(cfg.combined_length());
  for (std::size_t grp = 0; grp < cfg.q; ++grp) {
    const CMatrix block = kron(ch.h_group(grp, cfg.nbar), ch.g_group(grp, cfg.nbar));
    out.c.insert(out.c.end(), block.data().begin(), block.data().end());
  }
  out.c_matrix = unvec(out.c, cfg.mr * cfg.mt, cfg.nbar * cfg.nbar * cfg.q);
  return out;
}

}  // namespace bdris
