#include "bdris/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace bdris {

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::group_size: return "group_size";
    case SweepAxis::pilot_length: return "pilot_length";
    case SweepAxis::antennas: return "antennas";
    case SweepAxis::ris_elements: return "ris_elements";
  }
  return "?";
}

const char* to_string(Method m) { return m == Method::LS ? "LS" : "KRF"; }

std::vector<SystemConfig> ExperimentSpec::cells() const {
  auto make = [&](std::size_t mt_, std::size_t mr_, std::size_t n_, std::size_t nbar_,
                  std::size_t t_) {
    SystemConfig cfg = SystemConfig::make(mt_, mr_, n_, nbar_, 0.0, t_);
    if (cfg.t > max_pilot_length)
      throw ConfigError("pilot length " + std::to_string(cfg.t) + " exceeds the limit of " +
                        std::to_string(max_pilot_length) + " (raise max_t to run it)");
    if (cfg.t % cfg.t_min() != 0)
      throw ConfigError("pilot length " + std::to_string(cfg.t) +
                        " is not a whole multiple of t_min = " + std::to_string(cfg.t_min()));
    return cfg;
  };

  std::vector<SystemConfig> out;
  switch (axis) {
    case SweepAxis::none:
      out.push_back(make(mt, mr, n, nbar, t));
      break;
    case SweepAxis::group_size:
      for (auto v : values) out.push_back(make(mt, mr, n, v, t));
      break;
    case SweepAxis::pilot_length:
      for (auto v : values) out.push_back(make(mt, mr, n, nbar, v));
      break;
    case SweepAxis::ris_elements:
      for (auto v : values) out.push_back(make(mt, mr, v, nbar, t));
      break;
    case SweepAxis::antennas:
      for (auto a : antenna_values) out.push_back(make(a.mt, a.mr, n, nbar, t));
      break;
  }
  return out;
}

void ExperimentSpec::validate() const {
  if (trials == 0) throw ConfigError("trials must be >= 1");
  if (snr_grid.empty()) throw ConfigError("snr grid is empty");
  if (axis == SweepAxis::antennas ? antenna_values.empty()
                                  : (axis != SweepAxis::none && values.empty()))
    throw ConfigError(std::string("sweep axis ") + to_string(axis) + " has no values");
  for (double s : snr_grid)
    if (std::isnan(s)) throw ConfigError("snr grid contains NaN");
  (void)cells();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(const SystemConfig& cfg, std::size_t trial_index,
                         std::uint64_t master_seed) {
  std::uint64_t h = splitmix64(master_seed);
  for (std::uint64_t field : {std::uint64_t(cfg.mt), std::uint64_t(cfg.mr), std::uint64_t(cfg.n),
                              std::uint64_t(cfg.nbar), std::uint64_t(cfg.q), std::uint64_t(cfg.t),
                              std::bit_cast<std::uint64_t>(cfg.snr_db + 0.0),
                              std::uint64_t(trial_index)})
    h = splitmix64(h ^ field);
  return h;
}

TrialResult run_trial(const SystemConfig& cfg, const TrainingDesign& td, std::size_t trial_index,
                      std::uint64_t master_seed) {
  RandomStream rng(trial_seed(cfg, trial_index, master_seed));
  const ChannelPair ch = generate_channels(cfg, rng);
  const CVector y = synthesize_rx(cfg, ch, td, rng);

  const CombinedChannel truth = combined_channel(cfg, ch);
  const LsEstimate ls = ls_matched_filter(y, td, cfg);
  const KrfEstimate kr = krf_decouple(ls, cfg);

  CombinedChannel ls_comb{ls.c_hat, {}};
  return {nmse(truth, ls_comb), nmse(truth, reconstruct_combined(kr, cfg))};
}

TrialResult run_trial(const SystemConfig& cfg, std::size_t trial_index, std::uint64_t master_seed) {
  return run_trial(cfg, build_training(cfg), trial_index, master_seed);
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::ofstream out;
  if (!spec.output_path.empty()) {
    out.open(spec.output_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file '" + spec.output_path.string() + "'");
  }

  const auto cells = spec.cells();
  std::vector<TrainingDesign> designs;
  designs.reserve(cells.size());
  for (const auto& c : cells) designs.push_back(build_training(c));

  const std::size_t n_snr = spec.snr_grid.size();
  const std::size_t n_jobs = cells.size() * n_snr * spec.trials;
  std::vector<TrialResult> results(n_jobs);

  // job = (cell * n_snr + snr) * trials + trial
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t trial = job % spec.trials;
      const std::size_t cell_snr = job / spec.trials;
      const std::size_t cell = cell_snr / n_snr;
      SystemConfig cfg = cells[cell];
      cfg.snr_db = spec.snr_grid[cell_snr % n_snr];
      cfg.seed = spec.master_seed;
      try {
        results[job] = run_trial(cfg, designs[cell], trial, spec.master_seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_jobs;
      }
    }
  };

  unsigned workers = spec.workers != 0 ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<std::size_t>(workers, n_jobs));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  rows.reserve(2 * cells.size() * n_snr);
  for (std::size_t cell = 0; cell < cells.size(); ++cell)
    for (std::size_t s = 0; s < n_snr; ++s) {
      double sum_ls = 0.0, sum_krf = 0.0;
      const std::size_t base = (cell * n_snr + s) * spec.trials;
      for (std::size_t k = 0; k < spec.trials; ++k) {
        sum_ls += results[base + k].nmse_ls;
        sum_krf += results[base + k].nmse_krf;
      }
      for (Method m : {Method::LS, Method::KRF}) {
        const auto& c = cells[cell];
        ResultRow row;
        row.snr_db = spec.snr_grid[s];
        row.mt = c.mt;
        row.mr = c.mr;
        row.n = c.n;
        row.nbar = c.nbar;
        row.q = c.q;
        row.t = c.t;
        row.method = m;
        row.nmse_mean = (m == Method::LS ? sum_ls : sum_krf) / double(spec.trials);
        row.nmse_db = 10.0 * std::log10(row.nmse_mean);
        row.trials = spec.trials;
        row.seed = spec.master_seed;
        rows.push_back(row);
      }
    }

  if (out.is_open()) {
    out << format_csv(rows);
    out.flush();
    if (!out) throw IoError("failed writing '" + spec.output_path.string() + "'");
  }
  return rows;
}

std::string shortest_repr(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << shortest_repr(r.snr_db) << ',' << r.mt << ',' << r.mr << ',' << r.n << ',' << r.nbar
       << ',' << r.q << ',' << r.t << ',' << to_string(r.method) << ','
       << shortest_repr(r.nmse_mean) << ',' << shortest_repr(r.nmse_db) << ',' << r.trials << ','
       << r.seed << '\n';
  }
  return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file '" + path.string() + "'");
  out << format_csv(rows);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

double rel_error(std::span<const cplx> a, std::span<const cplx> b) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err += std::norm(a[i] - b[i]);
    ref += std::norm(b[i]);
  }
  return ref == 0.0 ? std::sqrt(err) : std::sqrt(err / ref);
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
  CheckResult ortho{"training: omega^H omega = (t/nbar) I", true, 0.0};
  CheckResult unitary{"training: scattering blocks unitary", true, 0.0};
  CheckResult stacked{"model: per-slot rx == (omega (x) I) c", true, 0.0};
  CheckResult exact_ls{"estimators: noise-free LS exact", true, 0.0};
  CheckResult exact_krf{"estimators: noise-free KRF reconstruction exact", true, 0.0};

  auto track = [](CheckResult& r, double err, double tol) {
    r.worst_error = std::max(r.worst_error, err);
    if (!(err <= tol)) r.passed = false;
  };

  for (std::size_t mt : {1, 2, 3})
    for (std::size_t mr : {1, 2, 3})
      for (std::size_t nbar : {1, 2, 4})
        for (std::size_t q : {1, 2, 4}) {
          SystemConfig cfg = SystemConfig::make(mt, mr, nbar * q, nbar, kNoiseFree);
          const TrainingDesign td = build_training(cfg);

          if (mr == 1) {
            const CMatrix gram = td.omega.adjoint() * td.omega;
            const CMatrix target = CMatrix::identity(cfg.t_min()) * (double(cfg.t) / double(nbar));
            track(ortho, frobenius_norm(gram - target) / frobenius_norm(target), 1e-9);
            for (const auto& slot : td.s_seq)
              for (const auto& blk : slot)
                track(unitary, frobenius_norm(blk.adjoint() * blk - CMatrix::identity(nbar)), 1e-12);
          }
          if (q == 4) continue;

          RandomStream rng(trial_seed(cfg, 0, 0x5eed));
          const ChannelPair ch = generate_channels(cfg, rng);
          const CombinedChannel truth = combined_channel(cfg, ch);
          const CVector y = synthesize_rx(cfg, ch, td, rng);
          track(stacked, rel_error(y, apply_combined_pilot(td.omega, truth.c, mr)), 1e-10);

          const LsEstimate ls = ls_matched_filter(y, td, cfg);
          track(exact_ls, rel_error(ls.c_hat, truth.c), 1e-8);
          const CombinedChannel rec = reconstruct_combined(krf_decouple(ls, cfg), cfg);
          track(exact_krf, rel_error(rec.c, truth.c), 1e-8);
        }
  return {ortho, unitary, stacked, exact_ls, exact_krf};
}

}  // namespace bdris
