#include "bdris/experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bdris {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  return value;
}

double parse_db(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return kNoiseFree;
  return parse_number<double>(text, "snr value");
}

std::vector<std::size_t> parse_counts(std::string_view text, std::string_view what) {
  std::vector<std::size_t> out;
  for (auto part : split(text, ',')) out.push_back(parse_number<std::size_t>(part, what));
  return out;
}

AntennaPair parse_antennas(std::string_view text) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw ConfigError("antenna pair must look like MTxMR: '" + std::string(text) + "'");
  return {parse_number<std::size_t>(parts[0], "mt"), parse_number<std::size_t>(parts[1], "mr")};
}

}  // namespace

std::vector<double> parse_snr_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    const auto range = split(part, ':');
    if (range.size() == 1) {
      out.push_back(parse_db(part));
    } else if (range.size() == 3) {
      const double start = parse_db(range[0]);
      const double step = parse_db(range[1]);
      const double stop = parse_db(range[2]);
      if (!(step > 0) || !std::isfinite(start) || !std::isfinite(stop))
        throw ConfigError("invalid snr range '" + std::string(part) + "'");
      const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (std::size_t k = 0; k < count; ++k) out.push_back(start + double(k) * step);
    } else {
      throw ConfigError("invalid snr entry '" + std::string(part) + "'");
    }
  }
  return out;
}

SweepAxis parse_sweep_axis(std::string_view text) {
  for (auto axis : {SweepAxis::none, SweepAxis::group_size, SweepAxis::pilot_length,
                    SweepAxis::antennas, SweepAxis::ris_elements})
    if (text == to_string(axis)) return axis;
  throw ConfigError("unknown sweep axis '" + std::string(text) + "'");
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "mt") {
    spec.mt = parse_number<std::size_t>(value, "mt");
  } else if (key == "mr") {
    spec.mr = parse_number<std::size_t>(value, "mr");
  } else if (key == "n") {
    spec.n = parse_number<std::size_t>(value, "n");
  } else if (key == "nbar") {
    spec.nbar = parse_number<std::size_t>(value, "nbar");
  } else if (key == "t") {
    spec.t = value == "min" ? 0 : parse_number<std::size_t>(value, "t");
  } else if (key == "snr") {
    spec.snr_grid = parse_snr_list(value);
  } else if (key == "sweep") {
    spec.axis = parse_sweep_axis(value);
  } else if (key == "values") {
    spec.values.clear();
    spec.antenna_values.clear();
    if (value.find('x') != std::string_view::npos) {
      for (auto part : split(value, ',')) spec.antenna_values.push_back(parse_antennas(part));
    } else {
      spec.values = parse_counts(value, "sweep value");
    }
  } else if (key == "trials") {
    spec.trials = parse_number<std::size_t>(value, "trials");
  } else if (key == "seed") {
    spec.master_seed = parse_number<std::uint64_t>(value, "seed");
  } else if (key == "out") {
    spec.output_path = std::string(value);
  } else if (key == "workers") {
    spec.workers = parse_number<unsigned>(value, "workers");
  } else if (key == "max_t") {
    spec.max_pilot_length = parse_number<std::size_t>(value, "max_t");
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

ExperimentSpec parse_experiment_config(std::string_view text) {
  ExperimentSpec spec;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      apply_setting(spec, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spec;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace bdris
