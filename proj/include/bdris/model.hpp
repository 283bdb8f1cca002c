#pragma once

// Scenario model for a group-connected BD-RIS assisted MIMO link: system
// dimensions, Rayleigh channel draws, the orthogonal pilot/scattering
// training design and synthesis of the received training signal.

#include "bdris/matcore.hpp"

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdris {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

using RandomStream = std::mt19937_64;

inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

struct SystemConfig {
  std::size_t mt = 1;    // transmit antennas
  std::size_t mr = 1;    // receive antennas
  std::size_t n = 1;     // RIS elements
  std::size_t nbar = 1;  // group size
  std::size_t q = 1;     // group count
  std::size_t t = 1;     // pilot length
  double snr_db = 10.0;  // kNoiseFree disables the noise term
  std::uint64_t seed = 0;

  // Minimal pilot length for a unique combined-channel estimate.
  std::size_t t_min() const noexcept { return mt * nbar * nbar * q; }
  std::size_t combined_length() const noexcept { return mr * t_min(); }

  // Throws ConfigError on violated invariants.
  void validate() const;

  // Configuration with q = n / nbar and t = t_min (or the given t).
  static SystemConfig make(std::size_t mt, std::size_t mr, std::size_t n, std::size_t nbar,
                           double snr_db, std::size_t t = 0);
};

double noise_variance(double snr_db);

struct ChannelPair {
  CMatrix h;  // mt x n, TX to RIS
  CMatrix g;  // mr x n, RIS to RX

  CMatrix h_group(std::size_t group, std::size_t nbar) const { return h.columns(group * nbar, nbar); }
  CMatrix g_group(std::size_t group, std::size_t nbar) const { return g.columns(group * nbar, nbar); }
};

struct TrainingDesign {
  CMatrix x;                                // mt x t pilots
  std::vector<std::vector<CMatrix>> s_seq;  // [slot][group], nbar x nbar unitary blocks
  CMatrix s_bar;                            // nbar^2 q x t, stacked block vectorizations
  CMatrix omega;                            // t x (mt nbar^2 q) = (s_bar khatri-rao x)^T
};

struct CombinedChannel {
  CVector c;         // [vec(H1 (x) G1); ...; vec(HQ (x) GQ)]
  CMatrix c_matrix;  // (mr mt) x (nbar^2 q) reshape of c
};

ChannelPair generate_channels(const SystemConfig& cfg, RandomStream& rng);

// Shift-and-modulate scattering blocks phased across groups by DFT
// coefficients, pilots cycled over DFT columns. Slot t is decomposed as
// t mod t_min = k + nbar (p + nbar (g + q m)); longer designs repeat the
// minimal one, so t must be a whole multiple of t_min.
TrainingDesign build_training(const SystemConfig& cfg);

// y = [y_1; ...; y_T] with y_t = sum_q G^(q) S_t^(q) H^(q)^T x_t + b_t.
CVector synthesize_rx(const SystemConfig& cfg, const ChannelPair& ch, const TrainingDesign& td,
                      RandomStream& rng);

// Noise-free stacked form (omega (x) I_mr) c, evaluated as vec(C omega^T)
// with C the mr x (mt nbar^2 q) reshape of c.
CVector apply_combined_pilot(const CMatrix& omega, std::span<const cplx> c, std::size_t mr);

CombinedChannel combined_channel(const SystemConfig& cfg, const ChannelPair& ch);

}  // namespace bdris
