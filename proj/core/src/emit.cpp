#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bomp/experiments.hpp"

namespace bomp {

namespace {

using nlohmann::json;

std::string shortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("sweep csv: bad number '" + std::string(s) + "'");
  }
  return v;
}

Index parse_index(std::string_view s) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("sweep csv: bad integer '" + std::string(s) + "'");
  }
  return v;
}

constexpr std::string_view kCsvHeader =
    "solver,K,sigma_w,trials,successes,success_rate,ci_halfwidth";

json config_to_json(const ExperimentConfig& c) {
  json solvers = json::array();
  for (Solver s : c.solvers) solvers.push_back(std::string(to_string(s)));
  return json{{"m", c.m},
              {"n", c.n},
              {"d", c.d},
              {"k_values", c.k_values},
              {"sigma_w", c.sigma_w},
              {"trials", c.trials},
              {"base_seed", c.base_seed},
              {"solvers", solvers},
              {"certify", c.certify},
              {"threads", c.threads}};
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("m")) c.m = j.at("m").get<Index>();
  if (j.contains("n")) c.n = j.at("n").get<Index>();
  if (j.contains("d")) c.d = j.at("d").get<Index>();
  if (j.contains("k_values")) c.k_values = j.at("k_values").get<std::vector<Index>>();
  if (j.contains("sigma_w")) {
    const json& s = j.at("sigma_w");
    c.sigma_w = s.is_array() ? s.get<std::vector<double>>() : std::vector<double>{s.get<double>()};
  }
  if (j.contains("trials")) c.trials = j.at("trials").get<Index>();
  if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("solvers")) {
    c.solvers.clear();
    for (const auto& s : j.at("solvers")) c.solvers.push_back(parse_solver(s.get<std::string>()));
  }
  if (j.contains("certify")) c.certify = j.at("certify").get<bool>();
  if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> known{"m",         "n",       "d",       "k_values",
                                                "sigma_w",   "trials",  "base_seed", "solvers",
                                                "certify",   "threads"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("experiment config: unknown field '" + key + "'");
    }
  }
  return c;
}

std::string experiment_config_json(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "json") return ResultFormat::json;
  if (name == "svg") return ResultFormat::svg;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const SweepCell& c : result.cells) {
    out << to_string(c.solver) << ',' << c.k << ',' << shortest(c.sigma_w) << ',' << c.trials
        << ',' << c.successes << ',' << shortest(c.success_rate) << ','
        << shortest(c.ci_halfwidth) << '\n';
  }
}

std::vector<SweepCell> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("sweep csv: missing header");
  }
  std::vector<SweepCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view view = line;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      fields.push_back(view.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) throw std::runtime_error("sweep csv: expected 7 fields");
    SweepCell c;
    c.solver = parse_solver(fields[0]);
    c.k = parse_index(fields[1]);
    c.sigma_w = parse_double(fields[2]);
    c.trials = parse_index(fields[3]);
    c.successes = parse_index(fields[4]);
    c.success_rate = parse_double(fields[5]);
    c.ci_halfwidth = parse_double(fields[6]);
    cells.push_back(c);
  }
  return cells;
}

void write_sweep_json(std::ostream& out, const SweepResult& result) {
  json cells = json::array();
  for (const SweepCell& c : result.cells) {
    cells.push_back({{"solver", std::string(to_string(c.solver))},
                     {"K", c.k},
                     {"sigma_w", c.sigma_w},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"success_rate", c.success_rate},
                     {"ci_halfwidth", c.ci_halfwidth},
                     {"certified", c.certified},
                     {"certified_failures", c.certified_failures},
                     {"uncertified_successes", c.uncertified_successes}});
  }
  const json doc{{"config", config_to_json(result.config)},
                 {"cells", cells},
                 {"metadata",
                  {{"default_noise_grid", result.default_noise_grid},
                   {"wall_seconds", result.wall_seconds}}}};
  out << doc.dump(2) << '\n';
}

void write_sweep_svg(std::ostream& out, const SweepResult& result) {
  constexpr double width = 640.0, height = 420.0;
  constexpr double left = 70.0, right = 170.0, top = 30.0, bottom = 60.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  Index k_min = 1, k_max = 2;
  if (!result.cells.empty()) {
    k_min = k_max = result.cells.front().k;
    for (const SweepCell& c : result.cells) {
      k_min = std::min(k_min, c.k);
      k_max = std::max(k_max, c.k);
    }
    if (k_max == k_min) ++k_max;
  }
  auto x_of = [&](double k) {
    return left + plot_w * (k - static_cast<double>(k_min)) / static_cast<double>(k_max - k_min);
  };
  auto y_of = [&](double rate) { return top + plot_h * (1.0 - rate); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (Index k = k_min; k <= k_max; ++k) {
    out << "<text x=\"" << x_of(static_cast<double>(k)) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  for (int tick = 0; tick <= 5; ++tick) {
    const double rate = tick / 5.0;
    out << "<text x=\"" << left - 8 << "\" y=\"" << y_of(rate) + 4
        << "\" text-anchor=\"end\">" << shortest(rate) << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\">block sparsity level K</text>\n";
  out << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">success rate</text>\n";

  // One series per (solver, sigma_w), in first-appearance order.
  std::vector<std::pair<Solver, double>> keys;
  for (const SweepCell& c : result.cells) {
    const std::pair<Solver, double> key{c.solver, c.sigma_w};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  for (std::size_t s = 0; s < keys.size(); ++s) {
    const char* color = palette[s % std::size(palette)];
    std::vector<const SweepCell*> series;
    for (const SweepCell& c : result.cells) {
      if (c.solver == keys[s].first && c.sigma_w == keys[s].second) series.push_back(&c);
    }
    std::sort(series.begin(), series.end(),
              [](const SweepCell* a, const SweepCell* b) { return a->k < b->k; });
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const SweepCell* c : series) {
      out << x_of(static_cast<double>(c->k)) << ',' << y_of(c->success_rate) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(s);
    out << "<line x1=\"" << left + plot_w + 15 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + plot_w + 45 << "\" y=\"" << ly + 4 << "\">"
        << (keys[s].first == Solver::bomp ? "BOMP" : "OMP") << " sigma=" << shortest(keys[s].second)
        << "</text>\n";
  }
  out << "</svg>\n";
}

void emit_results(const SweepResult& result, ResultFormat format, std::ostream& out) {
  switch (format) {
    case ResultFormat::csv:
      write_sweep_csv(out, result);
      break;
    case ResultFormat::json:
      write_sweep_json(out, result);
      break;
    case ResultFormat::svg:
      write_sweep_svg(out, result);
      break;
  }
}

void emit_results(const SweepResult& result, ResultFormat format,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_results(result, format, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace bomp
