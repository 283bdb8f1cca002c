#include "bdris/estimators.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace bdris;
using bdris::testing::rel_err;

namespace {

struct Scenario {
  SystemConfig cfg;
  TrainingDesign td;
  ChannelPair ch;
  CombinedChannel truth;
  CVector y;
};

Scenario make_scenario(std::size_t mt, std::size_t mr, std::size_t nbar, std::size_t q,
                       double snr_db, std::uint64_t seed) {
  Scenario s;
  s.cfg = SystemConfig::make(mt, mr, nbar * q, nbar, snr_db);
  s.td = build_training(s.cfg);
  RandomStream rng(seed);
  s.ch = generate_channels(s.cfg, rng);
  s.truth = combined_channel(s.cfg, s.ch);
  s.y = synthesize_rx(s.cfg, s.ch, s.td, rng);
  return s;
}

// g^(q) h^(q)^T with g, h the vectorized group blocks
CMatrix group_outer(const CMatrix& h, const CMatrix& g, std::size_t grp, std::size_t nbar) {
  return CMatrix::column(vec(g.columns(grp * nbar, nbar))) *
         CMatrix::column(vec(h.columns(grp * nbar, nbar))).transpose();
}

}  // namespace

TEST_CASE("ls_matched_filter") {
  SUBCASE("zero input gives zero estimate") {
    const auto s = make_scenario(2, 2, 2, 2, 10.0, 1);
    const LsEstimate ls = ls_matched_filter(CVector(s.y.size()), s.td, s.cfg);
    for (auto x : ls.c_hat) CHECK(x == cplx{});
  }

  SUBCASE("noise-free input is recovered exactly") {
    const auto s = make_scenario(2, 3, 2, 2, kNoiseFree, 2);
    const LsEstimate ls = ls_matched_filter(s.y, s.td, s.cfg);
    CHECK(rel_err(ls.c_hat, s.truth.c) < 1e-9);
  }

  SUBCASE("equals the dense adjoint on a tiny configuration") {
    const auto s = make_scenario(1, 1, 2, 1, 5.0, 3);
    const CMatrix dense = kron(s.td.omega, CMatrix::identity(1)).adjoint();
    CVector expected = dense * s.y;
    for (auto& x : expected) x *= 2.0 / 4.0;
    CHECK(rel_err(ls_matched_filter(s.y, s.td, s.cfg).c_hat, expected) < 1e-14);

    const auto s2 = make_scenario(2, 3, 2, 1, 5.0, 4);
    const CMatrix dense2 = kron(s2.td.omega, CMatrix::identity(3)).adjoint();
    CVector expected2 = dense2 * s2.y;
    for (auto& x : expected2) x *= double(s2.cfg.nbar) / double(s2.cfg.t);
    CHECK(rel_err(ls_matched_filter(s2.y, s2.td, s2.cfg).c_hat, expected2) < 1e-13);
  }

  SUBCASE("length mismatch") {
    const auto s = make_scenario(1, 2, 2, 1, 5.0, 5);
    CHECK_THROWS_AS(ls_matched_filter(CVector(3), s.td, s.cfg), DimensionError);
  }
}

TEST_CASE("krf_decouple: noise-free group products are exact") {
  for (std::size_t mt : {1, 2, 3})
    for (std::size_t mr : {1, 2})
      for (std::size_t nbar : {1, 2, 4})
        for (std::size_t q : {1, 3}) {
          const auto s = make_scenario(mt, mr, nbar, q, kNoiseFree, 100 + mt * 7 + mr * 3 + nbar + q);
          const KrfEstimate kr = krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg);
          REQUIRE(kr.sigmas.size() == q);
          for (std::size_t grp = 0; grp < q; ++grp) {
            const CMatrix est = group_outer(kr.h_hat, kr.g_hat, grp, nbar);
            const CMatrix ref = group_outer(s.ch.h, s.ch.g, grp, nbar);
            CHECK(rel_err(est, ref) < 1e-8);
          }
        }
}

TEST_CASE("krf_decouple: scalar case splits the magnitude evenly") {
  const auto s = make_scenario(1, 1, 1, 1, kNoiseFree, 7);
  const KrfEstimate kr = krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg);
  const cplx hg = s.ch.h(0, 0) * s.ch.g(0, 0);
  CHECK(std::abs(kr.h_hat(0, 0) * kr.g_hat(0, 0) - hg) < 1e-12 * std::abs(hg));
  CHECK(std::abs(kr.h_hat(0, 0)) == doctest::Approx(std::sqrt(std::abs(hg))));
  CHECK(std::abs(kr.g_hat(0, 0)) == doctest::Approx(std::sqrt(std::abs(hg))));
}

TEST_CASE("krf_decouple: single-connected reduces to per-column rank-one fits") {
  const auto s = make_scenario(3, 2, 1, 4, kNoiseFree, 8);
  const KrfEstimate kr = krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg);
  for (std::size_t col = 0; col < 4; ++col) {
    // oracle: g_q h_q^T directly from the true columns
    const CMatrix ref = CMatrix::column(s.ch.g.col(col)) * CMatrix::column(s.ch.h.col(col)).transpose();
    const CMatrix est =
        CMatrix::column(kr.g_hat.col(col)) * CMatrix::column(kr.h_hat.col(col)).transpose();
    CHECK(rel_err(est, ref) < 1e-8);
    // each factor equals the truth up to one complex scalar
    const cplx ratio = kr.g_hat(0, col) / s.ch.g(0, col);
    for (std::size_t r = 0; r < 2; ++r) CHECK(std::abs(kr.g_hat(r, col) - ratio * s.ch.g(r, col)) < 1e-8);
  }
}

TEST_CASE("krf_decouple: group product equals sigma u v^H of the reshaped block") {
  const auto s = make_scenario(2, 2, 2, 2, 5.0, 9);
  const LsEstimate ls = ls_matched_filter(s.y, s.td, s.cfg);
  const KrfEstimate kr = krf_decouple(ls, s.cfg);
  const auto perm = kron_vec_permutation(2, 2, 2);
  const std::size_t block = 16;
  for (std::size_t grp = 0; grp < 2; ++grp) {
    const CVector cbar = perm.apply(std::span<const cplx>(ls.c_hat).subspan(grp * block, block));
    const RankOne r = rank_one_approx(unvec(cbar, 4, 4));
    const CMatrix expected = CMatrix::column(r.u) * CMatrix::column(r.v).adjoint() * r.sigma;
    CHECK(rel_err(group_outer(kr.h_hat, kr.g_hat, grp, 2), expected) < 1e-12);
    CHECK(kr.sigmas[grp] == r.sigma);
  }
}

TEST_CASE("krf_decouple: zero group gives zero factors") {
  const SystemConfig cfg = SystemConfig::make(2, 2, 4, 2, 10.0);
  LsEstimate ls{CVector(cfg.combined_length())};
  ls.c_hat[0] = 1.0;  // group 0 nonzero, group 1 zero
  const KrfEstimate kr = krf_decouple(ls, cfg);
  CHECK(kr.sigmas[0] > 0.0);
  CHECK(kr.sigmas[1] == 0.0);
  for (std::size_t j = 2; j < 4; ++j)
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(kr.h_hat(i, j) == cplx{});
      CHECK(kr.g_hat(i, j) == cplx{});
    }
  CHECK_THROWS_AS(krf_decouple(LsEstimate{CVector(5)}, cfg), DimensionError);
}

TEST_CASE("reconstruct_combined") {
  SUBCASE("noise-free pipeline reproduces the truth") {
    const auto s = make_scenario(2, 3, 4, 2, kNoiseFree, 10);
    const auto rec = reconstruct_combined(krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg), s.cfg);
    CHECK(rel_err(rec.c, s.truth.c) < 1e-8);
  }

  SUBCASE("per-group scalar ambiguity cancels") {
    const auto s = make_scenario(2, 2, 2, 2, 10.0, 11);
    const KrfEstimate kr = krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg);
    KrfEstimate scaled = kr;
    const cplx lambdas[2] = {cplx(0.3, -1.7), cplx(-2.0, 0.5)};
    for (std::size_t grp = 0; grp < 2; ++grp)
      for (std::size_t j = grp * 2; j < grp * 2 + 2; ++j) {
        for (std::size_t i = 0; i < 2; ++i) scaled.g_hat(i, j) *= lambdas[grp];
        for (std::size_t i = 0; i < 2; ++i) scaled.h_hat(i, j) /= lambdas[grp];
      }
    CHECK(rel_err(reconstruct_combined(scaled, s.cfg).c, reconstruct_combined(kr, s.cfg).c) < 1e-12);
  }

  SUBCASE("zero estimate") {
    const SystemConfig cfg = SystemConfig::make(1, 2, 4, 2, 10.0);
    const KrfEstimate zero{CMatrix(1, 4), CMatrix(2, 4), {0.0, 0.0}};
    for (auto x : reconstruct_combined(zero, cfg).c) CHECK(x == cplx{});
  }
}

TEST_CASE("nmse") {
  const CombinedChannel truth{{cplx(1, 2), cplx(-3, 0.5), cplx(0, 1)}, {}};
  CHECK(nmse(truth, truth) == 0.0);
  CHECK(nmse(truth, CombinedChannel{CVector(3), {}}) == 1.0);
  CombinedChannel twice = truth;
  for (auto& x : twice.c) x *= 2.0;
  CHECK(nmse(truth, twice) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(nmse(CombinedChannel{CVector(3), {}}, truth), std::domain_error);
  CHECK_THROWS_AS(nmse(truth, CombinedChannel{CVector(2), {}}), DimensionError);
}

TEST_CASE("resolve_ambiguity") {
  const SystemConfig cfg = SystemConfig::make(2, 2, 4, 2, 10.0);
  RandomStream rng(12);
  const ChannelPair ch = generate_channels(cfg, rng);

  SUBCASE("exact estimate") {
    const KrfEstimate kr{ch.h, ch.g, {1.0, 1.0}};
    const auto a = resolve_ambiguity(ch, kr, cfg);
    for (auto l : a.lambdas) CHECK(std::abs(l - 1.0) < 1e-15);
  }

  SUBCASE("pure phase") {
    const cplx i{0, 1};
    const KrfEstimate kr{ch.h * (-i), ch.g * i, {1.0, 1.0}};
    const auto a = resolve_ambiguity(ch, kr, cfg);
    for (auto l : a.lambdas) CHECK(std::abs(l - i) < 1e-15);
    CHECK(rel_err(a.g_aligned, ch.g) < 1e-15);
    CHECK(rel_err(a.h_aligned, ch.h) < 1e-15);
  }

  SUBCASE("noise-free pipeline") {
    const auto s = make_scenario(2, 3, 2, 3, kNoiseFree, 13);
    const KrfEstimate kr = krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg);
    const auto a = resolve_ambiguity(s.ch, kr, s.cfg);
    CHECK(rel_err(a.g_aligned, s.ch.g) < 1e-8);
    CHECK(rel_err(a.h_aligned, s.ch.h) < 1e-8);
  }

  SUBCASE("zero true block") {
    ChannelPair zeroed = ch;
    for (std::size_t i = 0; i < 2; ++i) zeroed.g(i, 0) = zeroed.g(i, 1) = 0.0;
    CHECK_THROWS_AS(resolve_ambiguity(zeroed, KrfEstimate{ch.h, ch.g, {}}, cfg), std::domain_error);
  }
}

TEST_CASE("unbiasedness chain over the dimension sweep") {
  std::uint64_t seed = 1000;
  for (std::size_t mt : {1, 2})
    for (std::size_t mr : {1, 2, 3})
      for (std::size_t nbar : {1, 2, 4})
        for (std::size_t q : {1, 2}) {
          const auto s = make_scenario(mt, mr, nbar, q, kNoiseFree, seed++);
          const auto rec = reconstruct_combined(krf_decouple(ls_matched_filter(s.y, s.td, s.cfg), s.cfg), s.cfg);
          CHECK(rel_err(rec.c, s.truth.c) < 1e-8);
        }
}
