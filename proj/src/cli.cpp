#include "gutmanlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gutmanlab/classifiers.hpp"
#include "gutmanlab/distribution.hpp"
#include "gutmanlab/divergences.hpp"
#include "gutmanlab/exponents.hpp"
#include "gutmanlab/simulation.hpp"
#include "gutmanlab/special_functions.hpp"

namespace gutmanlab::cli {
namespace {

using nlohmann::json;

// All floating-point output carries 12 significant digits.
double sig12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

json num(double v) {
  if (std::isfinite(v)) return sig12(v);
  if (std::isnan(v)) return "nan";
  return v > 0 ? "infinity" : "-infinity";
}

json estimate_json(const Estimate& e) {
  return json{{"estimate", num(e.value)}, {"stderr", num(e.std_error)}};
}

json probs_json(const Distribution& d) {
  json arr = json::array();
  for (double p : d.probs()) arr.push_back(num(p));
  return arr;
}

std::string verdict_name(const Verdict& v) {
  return v.rejected() ? "reject" : "H" + std::to_string(v.decision);
}

struct NGrid {
  std::uint64_t start = 0, stop = 0, step = 0;
  std::vector<std::uint64_t> values() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = start; n <= stop; n += step) out.push_back(n);
    return out;
  }
};

NGrid parse_n_grid(const std::string& text) {
  NGrid g;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%llu:%llu:%llu%c",
                  reinterpret_cast<unsigned long long*>(&g.start),
                  reinterpret_cast<unsigned long long*>(&g.stop),
                  reinterpret_cast<unsigned long long*>(&g.step), &extra) != 3 ||
      g.step == 0 || g.stop < g.start) {
    throw CLI::ValidationError("--n-grid", "expected start:stop:step with step > 0");
  }
  return g;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("list", "expected comma-separated numbers");
  return out;
}

Sequence parse_sequence(const std::string& text) {
  Sequence out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  }
  return out;
}

std::vector<Sequence> parse_sequences(const std::string& text) {
  std::vector<Sequence> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!item.empty()) out.push_back(parse_sequence(item));
  }
  return out;
}

Distribution load_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--dist", "cannot open " + path);
  json j = json::parse(in);
  return Distribution(j.get<std::vector<double>>());
}

std::vector<Distribution> load_distributions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--dists", "cannot open " + path);
  json j = json::parse(in);
  std::vector<Distribution> out;
  for (const auto& row : j) out.emplace_back(row.get<std::vector<double>>());
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("GUTMANLAB_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

// Expands `--config file.json` into ordinary long options so one parser
// handles both paths; unknown keys then fail like unknown flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") {
      out.push_back(args[i]);
      continue;
    }
    if (i + 1 >= args.size()) throw CLI::ValidationError("--config", "missing file");
    std::ifstream in(args[i + 1]);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + args[i + 1]);
    json j = json::parse(in);
    for (auto it = j.begin(); it != j.end(); ++it) {
      out.push_back("--" + it.key());
      if (it->is_boolean()) {
        if (!it->get<bool>()) out.pop_back();  // false flags stay unset
        continue;
      }
      if (it->is_array()) {
        std::string joined;
        for (const auto& v : *it) {
          if (!joined.empty()) joined += ",";
          joined += v.dump();
        }
        out.push_back(joined);
      } else if (it->is_string()) {
        out.push_back(it->get<std::string>());
      } else {
        out.push_back(it->dump());
      }
    }
    ++i;
  }
  return out;
}

void emit(const json& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload.dump(2) << "\n";
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot write " + out_path);
  file << payload.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot write " + out_path);
  file << text;
}

std::string format_csv_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CommonOutput {
  std::string format = "json";
  std::string out_path;
};

void add_output_options(CLI::App* cmd, CommonOutput& opts, bool csv_default = false) {
  if (csv_default) opts.format = "csv";
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opts.out_path, "Write output to this file instead of stdout");
}

// ---------------------------------------------------------------------------
// Subcommand wiring. Each handler fills `result` and `config`; run() emits.
// ---------------------------------------------------------------------------

struct Invocation {
  json config;
  json result;
  std::string text;  // non-JSON payload (CSV)
  CommonOutput output;
};

void setup_divergence(CLI::App& app, std::vector<std::function<void()>>& actions,
                      Invocation& inv) {
  auto* cmd = app.add_subcommand("divergence", "Evaluate divergence functionals");
  auto p1 = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto p2 = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto p3 = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto dist1 = std::make_shared<std::string>();
  auto dist2 = std::make_shared<std::string>();
  auto dist3 = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(1.0);
  auto want_kl = std::make_shared<bool>(false);
  auto want_gjs = std::make_shared<bool>(false);
  auto want_dispersion = std::make_shared<bool>(false);
  auto want_third = std::make_shared<bool>(false);
  auto renyi_gamma = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto tilted_gamma = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto triple_gamma = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  cmd->add_option("--p1", *p1, "P1 = Bern(p1): probability of symbol 1");
  cmd->add_option("--p2", *p2, "P2 = Bern(p2)");
  cmd->add_option("--p3", *p3, "P3 = Bern(p3), for --triple");
  cmd->add_option("--dist1", *dist1, "JSON file with the P1 probability array");
  cmd->add_option("--dist2", *dist2, "JSON file with the P2 probability array");
  cmd->add_option("--dist3", *dist3, "JSON file with the P3 probability array");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_flag("--kl", *want_kl, "Relative entropy D(P1||P2)");
  cmd->add_flag("--gjs", *want_gjs, "Generalized Jensen-Shannon divergence");
  cmd->add_flag("--dispersion", *want_dispersion, "Dispersion V(P1,P2,alpha)");
  cmd->add_flag("--third-moment", *want_third, "Third absolute moment T(P1,P2,alpha)");
  cmd->add_option("--renyi", *renyi_gamma, "Renyi divergence of this order");
  cmd->add_option("--tilted", *tilted_gamma, "Tilted distribution of this exponent");
  cmd->add_option("--triple", *triple_gamma,
                  "Three-distribution divergence of this order (needs P3)");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    auto load = [&](double p, const std::string& file,
                    const char* name) -> Distribution {
      if (!file.empty()) return load_distribution_file(file);
      if (std::isnan(p)) {
        throw CLI::ValidationError(name, "distribution required (flag or file)");
      }
      return Distribution::bernoulli(p);
    };
    Distribution d1 = load(*p1, *dist1, "--p1");
    Distribution d2 = load(*p2, *dist2, "--p2");
    inv.config = json::object();
    if (!dist1->empty()) inv.config["dist1"] = *dist1; else inv.config["p1"] = *p1;
    if (!dist2->empty()) inv.config["dist2"] = *dist2; else inv.config["p2"] = *p2;
    inv.config["alpha"] = *alpha;
    json& res = inv.result;
    if (*want_kl) {
      res["kl"] = num(kl_divergence(d1, d2));
      inv.config["kl"] = true;
    }
    if (*want_gjs) {
      res["gjs"] = num(gjs_divergence(d1, d2, *alpha));
      inv.config["gjs"] = true;
    }
    if (*want_dispersion) {
      res["dispersion"] = num(dispersion(d1, d2, *alpha));
      inv.config["dispersion"] = true;
    }
    if (*want_third) {
      res["third_moment"] = num(third_absolute_moment(d1, d2, *alpha));
      inv.config["third-moment"] = true;
    }
    if (!std::isnan(*renyi_gamma)) {
      res["renyi"] = num(renyi_divergence(*renyi_gamma, d1, d2));
      inv.config["renyi"] = *renyi_gamma;
    }
    if (!std::isnan(*tilted_gamma)) {
      res["tilted"] = probs_json(tilted_distribution(d1, d2, *tilted_gamma));
      inv.config["tilted"] = *tilted_gamma;
    }
    if (!std::isnan(*triple_gamma)) {
      Distribution d3 = load(*p3, *dist3, "--p3");
      if (!dist3->empty()) inv.config["dist3"] = *dist3; else inv.config["p3"] = *p3;
      res["triple"] = num(triple_divergence(*triple_gamma, d1, d2, d3));
      inv.config["triple"] = *triple_gamma;
    }
    if (res.empty()) {
      throw CLI::ValidationError("divergence", "select at least one measure");
    }
  });
}

void setup_exponent(CLI::App& app, std::vector<std::function<void()>>& actions,
                    Invocation& inv) {
  auto* cmd = app.add_subcommand("exponent", "Solve divergence-constrained exponents");
  auto program = std::make_shared<std::string>("binary");
  auto p1 = std::make_shared<double>(0.2);
  auto p2 = std::make_shared<double>(0.4);
  auto p3 = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto dist1 = std::make_shared<std::string>();
  auto dist2 = std::make_shared<std::string>();
  auto dist3 = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(1.0);
  auto lambda = std::make_shared<double>(0.0);
  auto n = std::make_shared<std::uint64_t>(0);
  cmd->add_option("--program", *program, "binary, triple, or lattice")
      ->check(CLI::IsMember({"binary", "triple", "lattice"}));
  cmd->add_option("--p1", *p1, "First distribution as Bern(p1)");
  cmd->add_option("--p2", *p2, "Second distribution as Bern(p2)");
  cmd->add_option("--p3", *p3, "Third distribution as Bern(p3) (triple only)");
  cmd->add_option("--dist1", *dist1, "JSON file with the first probability array");
  cmd->add_option("--dist2", *dist2, "JSON file with the second probability array");
  cmd->add_option("--dist3", *dist3, "JSON file with the third probability array");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--lambda", *lambda, "Divergence constraint level");
  cmd->add_option("--n", *n, "Test length for the lattice program");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    auto load = [&](double p, const std::string& file) -> Distribution {
      if (!file.empty()) return load_distribution_file(file);
      return Distribution::bernoulli(p);
    };
    Distribution d1 = load(*p1, *dist1);
    Distribution d2 = load(*p2, *dist2);
    inv.config = {{"program", *program}, {"alpha", *alpha}, {"lambda", *lambda}};
    if (!dist1->empty()) inv.config["dist1"] = *dist1; else inv.config["p1"] = *p1;
    if (!dist2->empty()) inv.config["dist2"] = *dist2; else inv.config["p2"] = *p2;
    ExponentSolution sol;
    if (*program == "binary") {
      sol = error_exponent(d1, d2, *alpha, *lambda);
    } else if (*program == "lattice") {
      if (*n == 0) throw CLI::ValidationError("--n", "required for the lattice program");
      inv.config["n"] = *n;
      sol = error_exponent_on_types(d1, d2, *alpha, *lambda, *n);
    } else {
      if (dist3->empty() && std::isnan(*p3)) {
        throw CLI::ValidationError("--p3", "required for the triple program");
      }
      Distribution d3 = load(*p3, *dist3);
      if (!dist3->empty()) inv.config["dist3"] = *dist3; else inv.config["p3"] = *p3;
      sol = rejection_exponent(d1, d2, d3, *alpha, *lambda);
    }
    inv.result["value"] = num(sol.value);
    json mins = json::array();
    for (const Distribution& m : sol.minimizers) mins.push_back(probs_json(m));
    inv.result["minimizers"] = mins;
    inv.result["multiplier"] = num(sol.multiplier);
    inv.result["converged"] = sol.converged;
    inv.result["residual"] = num(sol.residual);
  });
}

void setup_threshold(CLI::App& app, std::vector<std::function<void()>>& actions,
                     Invocation& inv) {
  auto* cmd = app.add_subcommand("threshold", "Compute decision thresholds");
  auto mode = std::make_shared<std::string>("second-order");
  auto p1 = std::make_shared<double>(0.2);
  auto p2 = std::make_shared<double>(0.4);
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(1000);
  auto epsilon = std::make_shared<double>(0.2);
  auto lambda = std::make_shared<double>(0.0);
  auto alphabet = std::make_shared<std::size_t>(2);
  auto probs = std::make_shared<std::string>();
  auto epsilons = std::make_shared<std::string>();
  cmd->add_option("--mode", *mode, "second-order, gutman-corrected, chi2-dual, multi")
      ->check(CLI::IsMember({"second-order", "gutman-corrected", "chi2-dual", "multi"}));
  cmd->add_option("--p1", *p1, "First distribution as Bern(p1)");
  cmd->add_option("--p2", *p2, "Second distribution as Bern(p2)");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--epsilon", *epsilon, "Target probability");
  cmd->add_option("--lambda", *lambda, "Input threshold (gutman-corrected mode)");
  cmd->add_option("--alphabet-size", *alphabet, "Alphabet size");
  cmd->add_option("--probs", *probs, "Comma list of Bernoulli parameters (multi mode)");
  cmd->add_option("--epsilons", *epsilons, "Comma list of per-hypothesis targets");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    inv.config = {{"mode", *mode}, {"alpha", *alpha}, {"n", *n}};
    double value = 0.0;
    if (*mode == "second-order") {
      inv.config["p1"] = *p1;
      inv.config["p2"] = *p2;
      inv.config["epsilon"] = *epsilon;
      value = threshold_second_order(Distribution::bernoulli(*p1),
                                     Distribution::bernoulli(*p2), *alpha, *n,
                                     Probability(*epsilon));
    } else if (*mode == "gutman-corrected") {
      inv.config["lambda"] = *lambda;
      inv.config["alphabet-size"] = *alphabet;
      value = threshold_gutman_corrected(*lambda, *n, *alpha, *alphabet);
    } else if (*mode == "chi2-dual") {
      inv.config["epsilon"] = *epsilon;
      inv.config["alphabet-size"] = *alphabet;
      value = threshold_chi2_dual(*n, *alphabet, Probability(*epsilon));
    } else {
      if (probs->empty() || epsilons->empty()) {
        throw CLI::ValidationError("--probs/--epsilons", "required in multi mode");
      }
      inv.config["probs"] = *probs;
      inv.config["epsilons"] = *epsilons;
      std::vector<Distribution> dists;
      for (double p : parse_double_list(*probs)) {
        dists.push_back(Distribution::bernoulli(p));
      }
      value = multi_threshold(dists, *alpha, *n, parse_double_list(*epsilons));
    }
    inv.result["lambda"] = num(value);
  });
}

void setup_classify(CLI::App& app, std::vector<std::function<void()>>& actions,
                    Invocation& inv) {
  auto* cmd = app.add_subcommand("classify", "Run a decision rule on sequences");
  auto rule = std::make_shared<std::string>("gutman");
  auto x1 = std::make_shared<std::string>();
  auto x2 = std::make_shared<std::string>();
  auto y = std::make_shared<std::string>();
  auto xs = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(1.0);
  auto lambda = std::make_shared<double>(0.0);
  auto lambda1 = std::make_shared<double>(0.0);
  auto lambda2 = std::make_shared<double>(0.0);
  auto alphabet = std::make_shared<std::size_t>(0);
  cmd->add_option("--rule", *rule, "gutman, unnikrishnan, gutman-multi, binary-reject")
      ->check(CLI::IsMember({"gutman", "unnikrishnan", "gutman-multi", "binary-reject"}));
  cmd->add_option("--x1", *x1, "First training sequence, comma-separated symbols");
  cmd->add_option("--x2", *x2, "Second training sequence");
  cmd->add_option("--y", *y, "Test sequence");
  cmd->add_option("--xs", *xs, "Training sequences, ';'-separated comma lists");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--lambda", *lambda, "Threshold");
  cmd->add_option("--lambda1", *lambda1, "First threshold (binary-reject)");
  cmd->add_option("--lambda2", *lambda2, "Second threshold (binary-reject)");
  cmd->add_option("--alphabet-size", *alphabet, "Alphabet size (0 = infer)");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    Sequence sy = parse_sequence(*y);
    inv.config = {{"rule", *rule}, {"y", *y}, {"alpha", *alpha}};
    Verdict v;
    if (*rule == "gutman") {
      inv.config["x1"] = *x1;
      inv.config["lambda"] = *lambda;
      v = gutman_binary_classify(parse_sequence(*x1), sy, *alpha, *lambda, *alphabet);
    } else if (*rule == "binary-reject") {
      inv.config["x1"] = *x1;
      inv.config["x2"] = *x2;
      inv.config["lambda1"] = *lambda1;
      inv.config["lambda2"] = *lambda2;
      v = binary_reject_classify(parse_sequence(*x1), parse_sequence(*x2), sy, *alpha,
                                 *lambda1, *lambda2, *alphabet);
    } else {
      inv.config["xs"] = *xs;
      inv.config["lambda"] = *lambda;
      std::vector<Sequence> seqs = parse_sequences(*xs);
      v = *rule == "unnikrishnan"
              ? unnikrishnan_classify(seqs, sy, *alpha, *lambda, *alphabet)
              : gutman_multi_classify(seqs, sy, *alpha, *lambda, *alphabet);
    }
    inv.result["verdict"] = verdict_name(v);
    inv.result["tie_broken"] = v.tie_broken;
    inv.result["length_mismatch"] = v.length_mismatch;
  });
}

void setup_simulate_binary(CLI::App& app, std::vector<std::function<void()>>& actions,
                           Invocation& inv) {
  auto* cmd = app.add_subcommand("simulate-binary",
                                 "Monte Carlo error probabilities of the binary test");
  auto p1 = std::make_shared<double>(0.2);
  auto p2 = std::make_shared<double>(0.4);
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(1000);
  auto lambda = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto epsilon = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
  auto trials = std::make_shared<std::uint64_t>(10000);
  auto seed = std::make_shared<std::uint64_t>(default_seed());
  auto threads = std::make_shared<unsigned>(0);
  auto mode = std::make_shared<std::string>("second-order");
  cmd->add_option("--p1", *p1, "P1 = Bern(p1)");
  cmd->add_option("--p2", *p2, "P2 = Bern(p2)");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--lambda", *lambda, "Explicit threshold (overrides --epsilon)");
  cmd->add_option("--epsilon", *epsilon, "Threshold target probability");
  cmd->add_option("--threshold-mode", *mode,
                  "Threshold family used with --epsilon")
      ->check(CLI::IsMember({"second-order", "gutman-corrected", "chi2-dual"}));
  cmd->add_option("--trials", *trials, "Independent experiments per hypothesis");
  cmd->add_option("--seed", *seed, "Random seed (default: GUTMANLAB_SEED or 1)");
  cmd->add_option("--threads", *threads, "Worker threads (0 = hardware)");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    Distribution d1 = Distribution::bernoulli(*p1);
    Distribution d2 = Distribution::bernoulli(*p2);
    ClassifierSpec spec;
    spec.alpha = *alpha;
    spec.alphabet_size = 2;
    if (!std::isnan(*lambda)) {
      spec.mode = ThresholdMode::explicit_value;
      spec.explicit_lambda = *lambda;
    } else {
      if (std::isnan(*epsilon)) {
        throw CLI::ValidationError("--lambda", "either --lambda or --epsilon required");
      }
      spec.epsilons = {*epsilon};
      spec.mode = *mode == "second-order"     ? ThresholdMode::second_order
                  : *mode == "gutman-corrected" ? ThresholdMode::gutman_corrected
                                                : ThresholdMode::chi2_dual;
    }
    double lam = resolve_threshold(spec, d1, d2, *n);
    inv.config = {{"p1", *p1},        {"p2", *p2},     {"alpha", *alpha},
                  {"n", *n},          {"lambda", lam}, {"trials", *trials},
                  {"seed", *seed}};
    BinaryMcReport r = mc_binary(d1, d2, *alpha, *n, lam, *trials, *seed, *threads);
    inv.result["beta1"] = estimate_json(r.beta1);
    inv.result["beta2"] = estimate_json(r.beta2);
    inv.result["trials"] = r.trials;
    inv.result["seed"] = r.seed;
  });
}

void setup_simulate_multi(CLI::App& app, std::vector<std::function<void()>>& actions,
                          Invocation& inv) {
  auto* cmd = app.add_subcommand(
      "simulate-multi", "Monte Carlo error/rejection probabilities, M hypotheses");
  auto probs = std::make_shared<std::string>();
  auto dists = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(1000);
  auto lambda = std::make_shared<double>(0.0);
  auto rule = std::make_shared<std::string>("unnikrishnan");
  auto trials = std::make_shared<std::uint64_t>(10000);
  auto seed = std::make_shared<std::uint64_t>(default_seed());
  auto threads = std::make_shared<unsigned>(0);
  cmd->add_option("--probs", *probs, "Comma list of Bernoulli parameters");
  cmd->add_option("--dists", *dists, "JSON file with an array of probability arrays");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--lambda", *lambda, "Threshold");
  cmd->add_option("--rule", *rule, "unnikrishnan or gutman-multi")
      ->check(CLI::IsMember({"unnikrishnan", "gutman-multi"}));
  cmd->add_option("--trials", *trials, "Independent experiments per hypothesis");
  cmd->add_option("--seed", *seed, "Random seed (default: GUTMANLAB_SEED or 1)");
  cmd->add_option("--threads", *threads, "Worker threads (0 = hardware)");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    std::vector<Distribution> ds;
    if (!dists->empty()) {
      ds = load_distributions_file(*dists);
      inv.config["dists"] = *dists;
    } else if (!probs->empty()) {
      for (double p : parse_double_list(*probs)) ds.push_back(Distribution::bernoulli(p));
      inv.config["probs"] = *probs;
    } else {
      throw CLI::ValidationError("--probs", "either --probs or --dists required");
    }
    inv.config["alpha"] = *alpha;
    inv.config["n"] = *n;
    inv.config["lambda"] = *lambda;
    inv.config["rule"] = *rule;
    inv.config["trials"] = *trials;
    inv.config["seed"] = *seed;
    MultiRule r = *rule == "unnikrishnan" ? MultiRule::unnikrishnan
                                          : MultiRule::gutman_multi;
    MultiMcReport rep = mc_multi(ds, *alpha, *n, *lambda, r, *trials, *seed, *threads);
    json err = json::array(), rej = json::array();
    for (const Estimate& e : rep.error) err.push_back(estimate_json(e));
    for (const Estimate& e : rep.rejection) rej.push_back(estimate_json(e));
    inv.result["error"] = err;
    inv.result["rejection"] = rej;
    inv.result["trials"] = rep.trials;
    inv.result["seed"] = rep.seed;
  });
}

void setup_exact(CLI::App& app, std::vector<std::function<void()>>& actions,
                 Invocation& inv) {
  auto* cmd = app.add_subcommand("exact",
                                 "Exact binary error probabilities by enumeration");
  auto p1 = std::make_shared<double>(0.2);
  auto p2 = std::make_shared<double>(0.4);
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(50);
  auto lambda = std::make_shared<double>(0.02);
  cmd->add_option("--p1", *p1, "P1 = Bern(p1)");
  cmd->add_option("--p2", *p2, "P2 = Bern(p2)");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--lambda", *lambda, "Threshold");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    inv.config = {{"p1", *p1}, {"p2", *p2}, {"alpha", *alpha}, {"n", *n},
                  {"lambda", *lambda}};
    ExactBinaryReport r = exact_binary(Distribution::bernoulli(*p1),
                                       Distribution::bernoulli(*p2), *alpha, *n,
                                       *lambda);
    inv.result["beta1"] = num(r.beta1);
    inv.result["beta2"] = num(r.beta2);
    inv.result["enumerated_cells"] = r.enumerated_cells;
  });
}

void setup_max_type1(CLI::App& app, std::vector<std::function<void()>>& actions,
                     Invocation& inv) {
  auto* cmd = app.add_subcommand("max-type1",
                                 "Maximal type-I error over Bernoulli sources");
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(1000);
  auto lambda = std::make_shared<double>(0.01);
  auto grid_step = std::make_shared<double>(0.05);
  auto trials = std::make_shared<std::uint64_t>(5000);
  auto seed = std::make_shared<std::uint64_t>(default_seed());
  auto threads = std::make_shared<unsigned>(0);
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--lambda", *lambda, "Threshold");
  cmd->add_option("--grid-step", *grid_step, "Bernoulli-parameter grid step");
  cmd->add_option("--trials", *trials, "Experiments per grid point");
  cmd->add_option("--seed", *seed, "Random seed (default: GUTMANLAB_SEED or 1)");
  cmd->add_option("--threads", *threads, "Worker threads (0 = hardware)");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    inv.config = {{"alpha", *alpha},         {"n", *n},
                  {"lambda", *lambda},       {"grid-step", *grid_step},
                  {"trials", *trials},       {"seed", *seed}};
    MaxType1Report r =
        max_type1_search(*alpha, *n, *lambda, *grid_step, *trials, *seed, *threads);
    inv.result["max_beta1"] = estimate_json(r.max_beta1);
    inv.result["argmax_p"] = num(r.argmax_p);
    json points = json::array();
    for (const auto& pt : r.points) {
      points.push_back(json{{"p", num(pt.p)}, {"beta1", estimate_json(pt.beta1)}});
    }
    inv.result["points"] = points;
  });
}

void setup_weak_convergence(CLI::App& app, std::vector<std::function<void()>>& actions,
                            Invocation& inv) {
  auto* cmd = app.add_subcommand(
      "weak-convergence", "KS diagnostic of the scaled statistic against chi-squared");
  auto p = std::make_shared<double>(0.3);
  auto dist = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(2.0);
  auto n = std::make_shared<std::uint64_t>(10000);
  auto trials = std::make_shared<std::uint64_t>(10000);
  auto seed = std::make_shared<std::uint64_t>(default_seed());
  auto threads = std::make_shared<unsigned>(0);
  auto with_samples = std::make_shared<bool>(false);
  cmd->add_option("--p", *p, "Source as Bern(p)");
  cmd->add_option("--dist", *dist, "JSON file with the source probability array");
  cmd->add_option("--alpha", *alpha, "Training-to-test length ratio");
  cmd->add_option("--n", *n, "Test sequence length");
  cmd->add_option("--trials", *trials, "Number of statistic samples");
  cmd->add_option("--seed", *seed, "Random seed (default: GUTMANLAB_SEED or 1)");
  cmd->add_option("--threads", *threads, "Worker threads (0 = hardware)");
  cmd->add_flag("--with-samples", *with_samples, "Include raw samples in the output");
  add_output_options(cmd, inv.output);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    Distribution d = dist->empty() ? Distribution::bernoulli(*p)
                                   : load_distribution_file(*dist);
    if (!dist->empty()) inv.config["dist"] = *dist; else inv.config["p"] = *p;
    inv.config["alpha"] = *alpha;
    inv.config["n"] = *n;
    inv.config["trials"] = *trials;
    inv.config["seed"] = *seed;
    WeakConvergenceReport r =
        weak_convergence_check(d, *alpha, *n, *trials, *seed, *threads);
    inv.result["ks_distance"] = num(r.ks_distance);
    inv.result["degenerate"] = r.degenerate;
    inv.result["trials"] = *trials;
    if (*with_samples) {
      json samples = json::array();
      for (double s : r.samples) samples.push_back(num(s));
      inv.result["samples"] = samples;
    }
  });
}

void setup_reproduce_fig1(CLI::App& app, std::vector<std::function<void()>>& actions,
                          Invocation& inv) {
  auto* cmd = app.add_subcommand(
      "reproduce-fig1", "Desk-scale reruns of the calibration experiments");
  auto panel = std::make_shared<std::string>("a");
  auto trials = std::make_shared<std::uint64_t>(100000);
  auto seed = std::make_shared<std::uint64_t>(default_seed());
  auto n_grid = std::make_shared<std::string>();
  auto grid_step = std::make_shared<double>(0.1);
  auto threads = std::make_shared<unsigned>(0);
  cmd->add_option("--panel", *panel, "a: type-II calibration; b: max type-I decay")
      ->check(CLI::IsMember({"a", "b"}));
  cmd->add_option("--trials", *trials, "Experiments per grid point");
  cmd->add_option("--seed", *seed, "Random seed (default: GUTMANLAB_SEED or 1)");
  cmd->add_option("--n-grid", *n_grid, "start:stop:step (defaults per panel)");
  cmd->add_option("--grid-step", *grid_step, "Source grid step (panel b)");
  cmd->add_option("--threads", *threads, "Worker threads (0 = hardware)");
  add_output_options(cmd, inv.output, /*csv_default=*/true);

  actions.emplace_back([=, &inv]() {
    if (!cmd->parsed()) return;
    constexpr double kAlpha = 2.0;
    constexpr double kEpsilon = 0.2;
    std::string grid_text = n_grid->empty()
                                ? (*panel == "a" ? "1000:5000:200" : "1000:5000:500")
                                : *n_grid;
    NGrid grid = parse_n_grid(grid_text);
    inv.config = {{"panel", *panel},   {"trials", *trials}, {"seed", *seed},
                  {"n-grid", grid_text}};
    std::ostringstream csv;
    json rows = json::array();
    if (*panel == "a") {
      Distribution d1 = Distribution::bernoulli(0.2);
      Distribution d2 = Distribution::bernoulli(0.4);
      csv << "n,beta2_hat,stderr,target\n";
      for (std::uint64_t n : grid.values()) {
        double lam = threshold_second_order(d1, d2, kAlpha, n, Probability(kEpsilon));
        BinaryMcReport r = mc_binary(d1, d2, kAlpha, n, lam, *trials, *seed, *threads);
        csv << n << "," << format_csv_value(r.beta2.value) << ","
            << format_csv_value(r.beta2.std_error) << "," << format_csv_value(kEpsilon)
            << "\n";
        rows.push_back(json{{"n", n},
                            {"beta2_hat", num(r.beta2.value)},
                            {"stderr", num(r.beta2.std_error)},
                            {"target", num(kEpsilon)}});
      }
    } else {
      inv.config["grid-step"] = *grid_step;
      Distribution d1 = Distribution::bernoulli(0.2);
      Distribution d2 = Distribution::bernoulli(0.228);
      csv << "n,log_max_beta1_hat,stderr_log,log_theoretical\n";
      for (std::uint64_t n : grid.values()) {
        double lam = threshold_second_order(d1, d2, kAlpha, n, Probability(kEpsilon));
        MaxType1Report r =
            max_type1_search(kAlpha, n, lam, *grid_step, *trials, *seed, *threads);
        double log_max = std::log(r.max_beta1.value);
        double stderr_log = r.max_beta1.value > 0.0
                                ? r.max_beta1.std_error / r.max_beta1.value
                                : std::numeric_limits<double>::quiet_NaN();
        double log_theory = -static_cast<double>(n) * lam;
        csv << n << "," << format_csv_value(log_max) << ","
            << format_csv_value(stderr_log) << "," << format_csv_value(log_theory)
            << "\n";
        rows.push_back(json{{"n", n},
                            {"log_max_beta1_hat", num(log_max)},
                            {"stderr_log", num(stderr_log)},
                            {"log_theoretical", num(log_theory)}});
      }
    }
    inv.text = csv.str();
    inv.result["rows"] = rows;
  });
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Type-based statistical classification toolkit"};
  app.require_subcommand(1);
  Invocation inv;
  std::vector<std::function<void()>> actions;
  setup_divergence(app, actions, inv);
  setup_exponent(app, actions, inv);
  setup_threshold(app, actions, inv);
  setup_classify(app, actions, inv);
  setup_simulate_binary(app, actions, inv);
  setup_simulate_multi(app, actions, inv);
  setup_exact(app, actions, inv);
  setup_max_type1(app, actions, inv);
  setup_weak_convergence(app, actions, inv);
  setup_reproduce_fig1(app, actions, inv);

  try {
    std::vector<std::string> args = expand_config(raw_args);
    // CLI11 consumes arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    for (auto& action : actions) action();
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }

  try {
    if (!inv.text.empty() && inv.output.format == "csv") {
      emit_text(inv.text, inv.output.out_path, out);
    } else {
      json payload;
      payload["config"] = inv.config;
      payload.update(inv.result);
      emit(payload, inv.output.out_path, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace gutmanlab::cli
