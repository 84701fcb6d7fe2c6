#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bomp/certificates.hpp"
#include "bomp/coherence.hpp"
#include "bomp/csv.hpp"
#include "bomp/error.hpp"
#include "bomp/experiments.hpp"
#include "bomp/recovery.hpp"

namespace bomp::cli {

namespace {

using nlohmann::json;

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Non-finite values (e.g. a degenerate greedy ratio) become null.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json pair_json(const PairMaximum& p) {
  return {{"value", p.value}, {"pair", {p.first, p.second}}};
}

json certificate_json(const RecoveryCertificate& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"condition_i_margin", number_json(c.condition_i_margin)},
          {"condition_ii_lhs", number_json(c.condition_ii_lhs)},
          {"condition_ii_rhs", number_json(c.condition_ii_rhs)},
          {"verdict", c.verdict},
          {"inputs",
           {{"coherence", c.inputs.coherence},
            {"nu", c.inputs.nu},
            {"K", c.inputs.k},
            {"d", c.inputs.d},
            {"noise_corr", c.inputs.noise_corr},
            {"signal_min", c.inputs.signal_min}}}};
}

json checks_json(const std::vector<InequalityCheck>& checks) {
  json out = json::array();
  for (const InequalityCheck& c : checks) {
    out.push_back({{"label", c.label},
                   {"lhs", number_json(c.lhs)},
                   {"rhs", number_json(c.rhs)},
                   {"asserted", c.asserted},
                   {"holds", c.holds}});
  }
  return out;
}

json trace_json(const RecoveryTrace& t) {
  json gammas = json::array();
  for (double g : t.gammas) gammas.push_back(number_json(g));
  return {{"chosen", t.chosen},
          {"residual_norms", t.residual_norms},
          {"gammas", gammas},
          {"estimate", vector_json(t.estimate)},
          {"iterations", t.iterations},
          {"stop_reason", std::string(to_string(t.stop_reason))}};
}

BlockDictionary load_dictionary(const std::string& path, Index d) {
  return BlockDictionary(read_csv_matrix(path), d);
}

int cmd_coherence(const std::string& matrix, Index d, std::ostream& out) {
  const BlockDictionary dict = load_dictionary(matrix, d);
  const CoherenceProfile p = coherence_profile(dict);
  const json doc{{"m", dict.rows()},
                 {"n", dict.cols()},
                 {"d", dict.block_size()},
                 {"L", dict.block_count()},
                 {"mu", p.mu},
                 {"mu_block", p.mu_block},
                 {"nu", p.nu},
                 {"gershgorin_floor", p.gershgorin_floor},
                 {"maximizers",
                  {{"mu", pair_json(p.mu_pair)},
                   {"mu_block", pair_json(p.mu_block_pair)},
                   {"nu", pair_json(p.nu_pair)}}}};
  out << doc.dump(2) << '\n';
  return 0;
}

struct RecoverArgs {
  std::string matrix;
  Index d = 1;
  std::string measurements;
  std::optional<Index> k;
  std::optional<double> epsilon;
  std::optional<Index> max_iters;
  std::vector<Index> true_support;
  std::string solver = "bomp";
};

int cmd_recover(const RecoverArgs& args, std::ostream& out) {
  const BlockDictionary dict = load_dictionary(args.matrix, args.d);
  const Vector y = read_csv_vector(args.measurements);
  StoppingRule stop;
  if (args.k) {
    stop = StoppingRule::known_k(*args.k);
  } else {
    const Index cap = std::min(dict.block_count(), dict.rows() / dict.block_size());
    stop = StoppingRule::residual_tol(*args.epsilon, args.max_iters.value_or(cap));
  }
  std::optional<BlockSupport> oracle;
  if (!args.true_support.empty()) oracle = BlockSupport(args.true_support, dict.block_count());

  const Solver solver = parse_solver(args.solver);
  const RecoveryTrace trace =
      solver == Solver::bomp ? bomp(y, dict, stop, oracle) : omp(y, dict, stop);
  json doc = trace_json(trace);
  doc["solver"] = args.solver;
  out << doc.dump(2) << '\n';
  return 0;
}

struct CertifyArgs {
  std::string matrix;
  Index d = 1;
  std::string signal;
  std::string noise;
  std::size_t trials = 256;
  std::uint64_t seed = 0x5eed;
};

int cmd_certify(const CertifyArgs& args, std::ostream& out) {
  const BlockDictionary dict = load_dictionary(args.matrix, args.d);
  const BlockSparseSignal signal = BlockSparseSignal::from_dense(read_csv_vector(args.signal), args.d);
  const Vector w = read_csv_vector(args.noise);
  if (signal.values().size() != dict.cols()) throw PartitionError("signal length must equal n");

  const CoherenceProfile p = coherence_profile(dict);
  const NoiseDecomposition nd = decompose_noise(dict, signal, w);
  const Index k = signal.sparsity();
  const Index d = dict.block_size();
  const bool orthonormal = p.nu <= 1e-10;

  json certs{
      {"noiseless_block", certificate_json(check_noiseless(p.mu_block, p.nu, k, d))},
      {"theorem1",
       certificate_json(check_theorem1(p.mu_block, p.nu, k, d, nd.omega, nd.x_block_min))},
      {"omp_tropp",
       certificate_json(check_omp_tropp(p.mu, k, d, nd.inf_noise_corr, nd.x_min))}};
  json ortho = certificate_json(check_bomp_orthonormal(p.mu_block, k, d, nd.omega, nd.x_block_min));
  ortho["applicable"] = orthonormal;
  certs["bomp_orthonormal"] = ortho;

  json chain = nullptr;
  if (orthonormal) {
    const ComparisonChainReport r = check_comparison_chain(dict, signal, w);
    chain = {{"bomp_lhs", number_json(r.bomp_lhs)},
             {"bomp_relaxed", number_json(r.bomp_relaxed)},
             {"omp_lhs", number_json(r.omp_lhs)},
             {"omp_ratio", number_json(r.omp_ratio)},
             {"bomp_ratio", number_json(r.bomp_ratio)},
             {"dense_blocks", r.dense_blocks},
             {"all_hold", r.all_hold()},
             {"checks", checks_json(r.checks)}};
  }

  json appendix = json::array();
  const AppendixOptions options{args.trials, args.seed};
  for (Index split = 0; split < k; ++split) {
    const AppendixBoundsReport r = check_appendix_bounds(
        dict, p, signal, w, split, signal.support().indices(), options);
    appendix.push_back({{"k", split},
                        {"conditioned", r.conditioned},
                        {"margin", r.margin},
                        {"operator_norm_upper", r.operator_norm_upper},
                        {"all_hold", r.all_hold()},
                        {"checks", checks_json(r.checks)}});
  }

  const json doc{{"m", dict.rows()},
                 {"n", dict.cols()},
                 {"d", d},
                 {"L", dict.block_count()},
                 {"K", k},
                 {"support", signal.support().indices()},
                 {"mu", p.mu},
                 {"mu_block", p.mu_block},
                 {"nu", p.nu},
                 {"gershgorin_floor", p.gershgorin_floor},
                 {"omega", nd.omega},
                 {"omega_off_support", nd.omega_off_support},
                 {"x_block_min", nd.x_block_min},
                 {"inf_noise_corr", nd.inf_noise_corr},
                 {"x_min", nd.x_min},
                 {"certificates", certs},
                 {"comparison_chain", chain},
                 {"appendix_bounds", appendix}};
  out << doc.dump(2) << '\n';
  return 0;
}

struct SweepArgs {
  std::string config_path;
  ExperimentConfig config;
  std::vector<std::string> solvers;
  bool no_certify = false;
  std::string out;
  std::string format = "csv";
};

int cmd_sweep(SweepArgs args, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = args.config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::runtime_error("cannot open " + args.config_path);
    std::stringstream text;
    text << in.rdbuf();
    config = parse_experiment_config(text.str());
    // Explicit flags override the file.
    if (sub.count("--m")) config.m = args.config.m;
    if (sub.count("--n")) config.n = args.config.n;
    if (sub.count("--d")) config.d = args.config.d;
    if (sub.count("--k-list")) config.k_values = args.config.k_values;
    if (sub.count("--sigma-list")) config.sigma_w = args.config.sigma_w;
    if (sub.count("--trials")) config.trials = args.config.trials;
    if (sub.count("--seed")) config.base_seed = args.config.base_seed;
    if (sub.count("--threads")) config.threads = args.config.threads;
  }
  if (!args.solvers.empty()) {
    config.solvers.clear();
    for (const std::string& s : args.solvers) config.solvers.push_back(parse_solver(s));
  }
  if (args.no_certify) config.certify = false;
  const ResultFormat format = parse_result_format(args.format);

  SweepResult result;
  try {
    result = run_sweep(config);
  } catch (const TrialError& e) {
    err << "solver error: " << e.what() << "\nreplay seed: " << e.seed() << '\n';
    return 2;
  }
  if (args.out.empty() || args.out == "-") {
    emit_results(result, format, out);
  } else {
    emit_results(result, format, std::filesystem::path(args.out));
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block orthogonal matching pursuit: recovery, coherence and certificates"};
  app.require_subcommand(1);

  std::string matrix;
  Index block_size = 1;

  auto* coherence_cmd = app.add_subcommand("coherence", "Coherence metrics of a dictionary");
  coherence_cmd->add_option("--matrix", matrix, "Dictionary CSV (unit-norm columns)")->required();
  coherence_cmd->add_option("--block-size", block_size, "Block length d")->required();

  RecoverArgs rec;
  auto* recover_cmd = app.add_subcommand("recover", "Run BOMP (or OMP) on measurements");
  recover_cmd->add_option("--matrix", rec.matrix, "Dictionary CSV")->required();
  recover_cmd->add_option("--block-size", rec.d, "Block length d")->required();
  recover_cmd->add_option("--measurements", rec.measurements, "Measurement vector CSV")->required();
  auto* k_opt = recover_cmd->add_option("--k", rec.k, "Known number of nonzero blocks");
  auto* eps_opt = recover_cmd->add_option("--epsilon", rec.epsilon, "Residual tolerance");
  k_opt->excludes(eps_opt);
  recover_cmd->add_option("--max-iters", rec.max_iters, "Iteration cap in residual mode");
  recover_cmd->add_option("--true-support", rec.true_support, "Oracle block support, e.g. 3,17")
      ->delimiter(',');
  recover_cmd->add_option("--solver", rec.solver, "bomp or omp");

  CertifyArgs cert;
  auto* certify_cmd = app.add_subcommand("certify", "Evaluate recovery certificates");
  certify_cmd->add_option("--matrix", cert.matrix, "Dictionary CSV")->required();
  certify_cmd->add_option("--block-size", cert.d, "Block length d")->required();
  certify_cmd->add_option("--signal", cert.signal, "Block-sparse signal CSV")->required();
  certify_cmd->add_option("--noise", cert.noise, "Noise vector CSV")->required();
  certify_cmd->add_option("--operator-norm-trials", cert.trials, "Probes for the sampled norm");
  certify_cmd->add_option("--operator-norm-seed", cert.seed, "Seed for the sampled norm");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo success-rate sweep");
  sweep_cmd->add_option("--config", sw.config_path, "ExperimentConfig JSON");
  sweep_cmd->add_option("--m", sw.config.m, "Measurements");
  sweep_cmd->add_option("--n", sw.config.n, "Signal length");
  sweep_cmd->add_option("--d", sw.config.d, "Block length");
  sweep_cmd->add_option("--k-list", sw.config.k_values, "Block sparsity levels")->delimiter(',');
  sweep_cmd->add_option("--sigma-list", sw.config.sigma_w, "Noise standard deviations")->delimiter(',');
  sweep_cmd->add_option("--trials", sw.config.trials, "Trials per cell");
  sweep_cmd->add_option("--seed", sw.config.base_seed, "Base seed");
  sweep_cmd->add_option("--solvers", sw.solvers, "bomp,omp")->delimiter(',');
  sweep_cmd->add_option("--threads", sw.config.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_flag("--no-certify", sw.no_certify, "Skip per-trial certificates");
  sweep_cmd->add_option("--out", sw.out, "Output path (default stdout)");
  sweep_cmd->add_option("--format", sw.format, "csv, json or svg");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*coherence_cmd) return cmd_coherence(matrix, block_size, out);
    if (*recover_cmd) {
      if (!rec.k && !rec.epsilon) {
        err << "recover: one of --k or --epsilon is required\n";
        return 1;
      }
      return cmd_recover(rec, out);
    }
    if (*certify_cmd) return cmd_certify(cert, out);
    if (*sweep_cmd) return cmd_sweep(sw, *sweep_cmd, out, err);
  } catch (const RecoveryError& e) {
    err << "solver error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace bomp::cli
