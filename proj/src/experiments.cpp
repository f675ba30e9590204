/*
 * Copyright 2026 The bcsl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bcsl/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bcsl/rng.hpp"

namespace bcsl::exp {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Field-checked view of one JSON object. Unknown keys are rejected by
// finish() so that typos surface as config errors.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long long>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const long long v = integer(key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError(field(key), "must be >= 0");
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  // A string or a non-empty array of strings.
  std::vector<std::string> texts(const std::string& key) {
    const auto& v = raw(key);
    std::vector<std::string> out;
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_array() && !v.empty()) {
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError(field(key), "expected strings");
        out.push_back(e.get<std::string>());
      }
    } else {
      throw ConfigError(field(key), "expected a string or a non-empty list of strings");
    }
    return out;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown field");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename F>
auto parse_enum(const std::string& field, const std::string& value, F parser) {
  try {
    return parser(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

void parse_data(Reader& top, RunConfig& cfg) {
  if (!top.has("data")) throw ConfigError("data", "missing");
  Reader r(top.raw("data"), "data");
  const std::string source = r.text("source", "synthetic");
  auto& ds = cfg.data;
  ds.test_size = r.count("test_size", 0);
  if (source == "synthetic") {
    ds.synthetic = true;
    auto& s = ds.synth;
    s.scenario = parse_enum(r.field("scenario"), r.text("scenario", "logistic_dense"),
                            data::parse_scenario);
    s.N = r.count("N", s.N);
    s.p = r.count("p", s.scenario == data::Scenario::logistic_sparse ? 1000 : s.p);
    s.theta_norm = r.number("theta_norm", s.theta_norm);
    const std::string sigma_default =
        s.scenario == data::Scenario::logistic_dense ? "paper_diag" : "identity";
    s.sigma = parse_enum(r.field("sigma"), r.text("sigma", sigma_default), data::parse_sigma);
    s.noise_sd = r.number("noise_sd", s.noise_sd);
    s.nonzeros = r.count("nonzeros", s.nonzeros);
    cfg.family = s.scenario == data::Scenario::linear ? glm::Family::linear
                                                      : glm::Family::logistic;
  } else if (source == "csv") {
    ds.synthetic = false;
    auto& c = ds.csv;
    c.path = r.text("path", "");
    if (c.path.empty()) throw ConfigError("data.path", "missing");
    c.label_column = static_cast<int>(r.integer("label_column", c.label_column));
    const std::string delim = r.text("delimiter", ",");
    if (delim.size() != 1) throw ConfigError("data.delimiter", "must be one character");
    c.delimiter = delim[0];
    c.header = r.flag("header", c.header);
    c.standardize = r.flag("standardize", c.standardize);
    c.add_intercept = r.flag("intercept", c.add_intercept);
  } else {
    throw ConfigError("data.source", "expected 'synthetic' or 'csv'");
  }
  r.finish();
}

void parse_lambda(const json& v, LambdaSpec& spec) {
  const std::string f = "algo.lambda";
  if (v.is_number()) {
    spec.mode = LambdaSpec::Mode::fixed;
    spec.value = v.get<double>();
    return;
  }
  Reader r(v, f);
  if (r.has("auto")) {
    const std::string rule = r.text("auto", "");
    if (rule == "linear_pn") spec.mode = LambdaSpec::Mode::linear_pn;
    else if (rule == "glm_default") spec.mode = LambdaSpec::Mode::glm_default;
    else throw ConfigError(f + ".auto", "expected 'linear_pn' or 'glm_default'");
    spec.c = r.number("c", 1.0);
  } else {
    spec.mode = LambdaSpec::Mode::fixed;
    spec.value = r.number("value", 0.0);
    if (r.has("zero")) spec.zero_init_value = r.number("zero", 0.0);
    if (r.has("local")) spec.local_init_value = r.number("local", 0.0);
    if (!r.has("value") && !(spec.zero_init_value && spec.local_init_value))
      throw ConfigError(f, "needs 'value' or both 'zero' and 'local'");
  }
  r.finish();
}

void parse_algo(Reader& top, RunConfig& cfg) {
  if (!top.has("algo")) return;
  Reader r(top.raw("algo"), "algo");
  if (r.has("algorithm")) {
    cfg.algorithms.clear();
    for (const auto& s : r.texts("algorithm"))
      cfg.algorithms.push_back(parse_enum("algo.algorithm", s, protocol::parse_algorithm));
  }
  if (r.has("rule")) {
    cfg.rules.clear();
    for (const auto& s : r.texts("rule"))
      cfg.rules.push_back(parse_enum("algo.rule", s, agg::parse_rule));
  }
  if (r.has("init")) {
    cfg.inits.clear();
    for (const auto& s : r.texts("init"))
      cfg.inits.push_back(parse_enum("algo.init", s, protocol::parse_init));
  }
  if (r.has("lambda")) parse_lambda(r.raw("lambda"), cfg.lambda);
  cfg.T = static_cast<int>(r.integer("T", cfg.T));
  r.finish();
}

void parse_attack_field(Reader& top, RunConfig& cfg) {
  if (!top.has("attack")) return;
  Reader r(top.raw("attack"), "attack");
  cfg.attack.kind = parse_enum("attack.kind", r.text("kind", "sign_flip"), adversary::parse_attack);
  const double fallback = cfg.attack.kind == adversary::AttackSpec::Kind::sign_flip ? 3.0
                          : cfg.attack.kind == adversary::AttackSpec::Kind::constant ? 0.0
                                                                                     : 1.0;
  cfg.attack.param = r.number("param", fallback);
  r.finish();
}

void parse_penalty(Reader& top, RunConfig& cfg) {
  if (!top.has("penalty")) return;
  Reader r(top.raw("penalty"), "penalty");
  auto& p = cfg.penalty;
  p.kind = parse_enum("penalty.kind", r.text("kind", "none"), glm::parse_penalty_kind);
  const std::string rule = r.text("rule", "fixed");
  if (rule == "fixed") p.paper_sparse_rule = false;
  else if (rule == "paper_sparse") p.paper_sparse_rule = true;
  else throw ConfigError("penalty.rule", "expected 'fixed' or 'paper_sparse'");
  p.gamma = r.number("gamma", 0.0);
  p.scale = r.number("scale", p.scale);
  r.finish();
}

void parse_solver(Reader& top, RunConfig& cfg) {
  if (!top.has("solver")) return;
  Reader r(top.raw("solver"), "solver");
  cfg.solver.tol = r.number("tol", cfg.solver.tol);
  cfg.solver.max_iter = static_cast<int>(r.integer("max_iter", cfg.solver.max_iter));
  cfg.solver.step.bb_initial = r.flag("bb", cfg.solver.step.bb_initial);
  cfg.centralized_max_iter =
      static_cast<int>(r.integer("centralized_max_iter", cfg.centralized_max_iter));
  r.finish();
}

void parse_theory(Reader& top, RunConfig& cfg) {
  if (!top.has("theory")) return;
  Reader r(top.raw("theory"), "theory");
  cfg.theory.enabled = r.flag("enabled", cfg.theory.enabled);
  cfg.theory.epsilon = r.number("epsilon", cfg.theory.epsilon);
  cfg.theory.D = r.number("D", cfg.theory.D);
  cfg.theory.max_hessian_dim = r.count("max_hessian_dim", cfg.theory.max_hessian_dim);
  r.finish();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void append_optional(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) out += format_double(*v);
}

std::size_t model_dim(const RunConfig& cfg, const Dataset* csv) {
  if (cfg.data.synthetic) return cfg.data.synth.p + 1;
  return csv ? csv->cols() : 0;
}

double resolve_lambda(const RunConfig& cfg, const Variant& v, std::size_t d,
                      std::size_t n_eff, const std::optional<TheoryDiagnostics>& th) {
  if (v.algorithm == protocol::Algorithm::bcsl) return 0.0;
  const auto& spec = cfg.lambda;
  switch (spec.mode) {
    case LambdaSpec::Mode::fixed:
      if (v.init == protocol::InitKind::zero && spec.zero_init_value) return *spec.zero_init_value;
      if (v.init == protocol::InitKind::local && spec.local_init_value)
        return *spec.local_init_value;
      return spec.value;
    case LambdaSpec::Mode::linear_pn:
      return theory::suggest_lambda_linear(d, n_eff, spec.c);
    case LambdaSpec::Mode::glm_default:
      if (!th || !th->suggested_lambda_glm)
        throw std::runtime_error("lambda rule glm_default needs the Hessian estimates");
      return spec.c * *th->suggested_lambda_glm;
  }
  return spec.value;
}

ReplicateResult run_replicate(const RunConfig& cfg, const std::vector<Variant>& variants,
                              int r, const Dataset* csv_data, bool baseline_only) {
  ReplicateResult out;
  out.replicate = r;
  out.seed = cfg.seed + static_cast<std::uint64_t>(r);

  Dataset full;
  if (cfg.data.synthetic) {
    auto spec = cfg.data.synth;
    spec.seed = derive_seed(out.seed, {stream::kData});
    auto gen = data::generate(spec);
    full = std::move(gen.data);
    out.theta_star = std::move(gen.theta_star);
  } else {
    full = *csv_data;
  }
  auto split = data::split_and_shard(full, cfg.data.test_size, cfg.m, cfg.n,
                                     derive_seed(out.seed, {stream::kSplit}), cfg.shard_policy);
  // Re-index so that machine k owns rows [(k-1) n, k n) of the training set.
  const auto allocated = split.shards.allocated();
  Dataset train = full.subset(allocated);
  Dataset test = full.subset(split.test_indices);
  full = Dataset();
  const std::size_t n = split.effective_n;
  std::vector<std::vector<std::size_t>> blocks(cfg.m + 1);
  for (std::size_t k = 0; k <= cfg.m; ++k)
    for (std::size_t i = 0; i < n; ++i) blocks[k].push_back(k * n + i);
  const ShardAssignment shards(std::move(blocks), train.rows());

  const bool intercept = cfg.data.synthetic || cfg.data.csv.add_intercept;
  if (!cfg.data.synthetic && cfg.data.csv.standardize) {
    const auto rows = train.all_indices();
    const auto s = data::Standardizer::fit(train, rows, intercept);
    train = s.apply(train);
    if (test.rows() > 0) test = s.apply(test);
  }

  const glm::GlmModel model{cfg.family, intercept};
  glm::Penalty penalty;
  penalty.kind = cfg.penalty.kind;
  if (cfg.penalty.kind != glm::Penalty::Kind::none) {
    if (cfg.penalty.paper_sparse_rule) {
      const double p = static_cast<double>(train.cols() - (intercept ? 1 : 0));
      penalty.gamma = cfg.penalty.scale *
                      std::sqrt(std::log(p) / static_cast<double>(train.rows()));
    } else {
      penalty.gamma = cfg.penalty.gamma;
    }
  }
  out.gamma = penalty.gamma;

  solver::SolverOptions central_opts = cfg.solver;
  central_opts.max_iter = cfg.centralized_max_iter;
  auto central = solver::centralized_minimizer(model, penalty, train, central_opts);
  out.theta_hat = central.theta;
  out.centralized_converged = central.diagnostics.converged;
  if (out.theta_star) out.centralized_err_star = l2_distance(out.theta_hat, *out.theta_star);
  if (test.rows() > 0 && test.kind() == LabelKind::binary)
    out.centralized_test_error =
        glm::classification_error(out.theta_hat, test, test.all_indices());

  const std::size_t d = train.cols();
  if (cfg.theory.enabled) {
    TheoryDiagnostics th;
    const auto rows = train.all_indices();
    const std::size_t cap = std::min<std::size_t>(rows.size(), 4000);
    const std::vector<double> zero(d, 0.0);
    th.params = theory::estimate_params(model, train, Shard(rows).first(cap), zero,
                                        cfg.theory.epsilon, cfg.theory.D);
    if (d <= cfg.theory.max_hessian_dim) {
      const auto h = theory::estimate_homogeneity(model, penalty, train, shards.master(), rows,
                                                  out.theta_hat);
      th.params.rho = h.rho;
      th.params.delta = h.delta;
      th.homogeneity_estimated = true;
      if (h.rho > 0.0) th.suggested_lambda_glm = theory::suggest_lambda_glm(h.delta, h.rho);
    }
    th.median_bound = theory::delta_nm_alpha(n, cfg.m, cfg.alpha, th.params, d);
    th.trimmed_bound =
        theory::delta_nm_beta(n, cfg.m, std::max(cfg.beta, cfg.alpha), th.params, d, cfg.alpha);
    th.suggested_lambda_linear_pn = theory::suggest_lambda_linear(d, n);
    out.theory = th;
  }
  if (baseline_only) return out;

  protocol::Environment env;
  env.model = model;
  env.penalty = penalty;
  env.data = &train;
  env.shards = &shards;
  env.mask = ByzantineMask::random(cfg.m, cfg.alpha, derive_seed(out.seed, {stream::kMask}));
  env.attack = cfg.attack;
  env.seed = out.seed;
  env.solver = cfg.solver;
  env.theta_star = out.theta_star;
  env.theta_hat = out.theta_hat;
  env.test_set = test.rows() > 0 ? &test : nullptr;
  env.timing = cfg.timing;

  for (const auto& v : variants) {
    protocol::AlgoSpec algo;
    algo.algorithm = v.algorithm;
    algo.rule = v.rule;
    algo.T = cfg.T;
    algo.init = v.init;
    algo.lambda = resolve_lambda(cfg, v, d, n, out.theory);
    out.lambdas.push_back(algo.lambda);
    out.traces.push_back(protocol::run(algo, env));
  }
  return out;
}

ojson stats_json(const CurveStats& s) {
  ojson j;
  j["mean"] = s.mean;
  j["std"] = s.stddev;
  j["count"] = s.count;
  return j;
}

ojson bound_json(const theory::BoundReport& b) {
  ojson j;
  j["bound"] = b.bound;
  j["feasibility_lhs"] = b.feasibility_lhs;
  j["feasibility_limit"] = b.feasibility_limit;
  j["feasible"] = b.feasible;
  j["remainder_order"] = b.remainder_order;
  return j;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

void RunConfig::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  if (name.find_first_of(",\"\n/\\") != std::string::npos)
    throw ConfigError("name", "must not contain commas, quotes, slashes or newlines");
  if (m < 2) throw ConfigError("topology.m", "need at least 2 workers");
  if (n < 1) throw ConfigError("topology.n", "must be >= 1");
  if (!(alpha >= 0.0 && alpha < 0.5)) throw ConfigError("alpha", "must lie in [0, 0.5)");
  if (!(beta >= 0.0 && beta < 0.5)) throw ConfigError("beta", "must lie in [0, 0.5)");
  if (replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (T < 0) throw ConfigError("algo.T", "must be >= 0");
  if (algorithms.empty()) throw ConfigError("algo.algorithm", "must not be empty");
  if (rules.empty()) throw ConfigError("algo.rule", "must not be empty");
  if (inits.empty()) throw ConfigError("algo.init", "must not be empty");
  for (auto k : rules) {
    const agg::AggRule rule{k, k == agg::AggRule::Kind::trimmed ? beta : 0.0};
    try {
      rule.validate(m);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(k == agg::AggRule::Kind::trimmed ? "beta" : "algo.rule", e.what());
    }
  }
  const bool has_p = std::find(algorithms.begin(), algorithms.end(),
                               protocol::Algorithm::bcslp) != algorithms.end();
  if (has_p) {
    if (lambda.mode == LambdaSpec::Mode::fixed) {
      bool ok = lambda.value > 0.0;
      for (auto i : inits) {
        const auto& o = i == protocol::InitKind::zero ? lambda.zero_init_value
                                                      : lambda.local_init_value;
        if (!((o ? *o : lambda.value) > 0.0)) ok = false;
      }
      if (!ok) throw ConfigError("algo.lambda", "bcslp requires lambda > 0");
    } else if (!(lambda.c > 0.0)) {
      throw ConfigError("algo.lambda.c", "must be > 0");
    }
    if (lambda.mode == LambdaSpec::Mode::glm_default &&
        (!theory.enabled ||
         (data.synthetic && data.synth.p + 1 > theory.max_hessian_dim)))
      throw ConfigError("algo.lambda",
                        "glm_default needs theory.enabled and dimension <= theory.max_hessian_dim");
  }
  try {
    attack.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("attack", e.what());
  }
  if (penalty.kind != glm::Penalty::Kind::none) {
    if (penalty.paper_sparse_rule) {
      if (!(penalty.scale > 0.0)) throw ConfigError("penalty.scale", "must be > 0");
    } else if (!(penalty.gamma >= 0.0)) {
      throw ConfigError("penalty.gamma", "must be >= 0");
    }
  }
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol", "must be > 0");
  if (solver.max_iter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  if (centralized_max_iter < 1) throw ConfigError("solver.centralized_max_iter", "must be >= 1");
  if (!(theory.epsilon > 0.0 && theory.epsilon < 0.5))
    throw ConfigError("theory.epsilon", "must lie in (0, 0.5)");
  if (!(theory.D > 0.0)) throw ConfigError("theory.D", "must be > 0");
  if (data.synthetic) {
    const auto& s = data.synth;
    if (s.N < 1) throw ConfigError("data.N", "must be >= 1");
    if (s.p < 1) throw ConfigError("data.p", "must be >= 1");
    if (!(s.theta_norm > 0.0)) throw ConfigError("data.theta_norm", "must be > 0");
    if (s.scenario == data::Scenario::logistic_dense && s.sigma == data::SigmaSpec::paper_diag &&
        s.p < 5)
      throw ConfigError("data.p", "paper_diag covariance needs p >= 5");
    if (s.scenario == data::Scenario::logistic_sparse && (s.nonzeros < 1 || s.nonzeros > s.p))
      throw ConfigError("data.nonzeros", "must lie in [1, p]");
  }
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  Reader r(j, "");
  cfg.name = r.text("name", cfg.name);
  parse_data(r, cfg);
  if (r.has("family"))
    cfg.family = parse_enum("family", r.text("family", ""), glm::parse_family);
  if (!r.has("topology")) throw ConfigError("topology", "missing");
  {
    Reader t(r.raw("topology"), "topology");
    cfg.n = t.count("n", 0);
    cfg.m = t.count("m", 0);
    t.finish();
  }
  cfg.alpha = r.number("alpha", cfg.alpha);
  cfg.beta = r.number("beta", cfg.beta);
  parse_algo(r, cfg);
  parse_attack_field(r, cfg);
  parse_penalty(r, cfg);
  parse_solver(r, cfg);
  const std::string policy = r.text("shard_policy", "clip");
  if (policy == "clip") cfg.shard_policy = data::ShardPolicy::clip;
  else if (policy == "strict") cfg.shard_policy = data::ShardPolicy::strict;
  else throw ConfigError("shard_policy", "expected 'clip' or 'strict'");
  cfg.replicates = static_cast<int>(r.integer("replicates", cfg.replicates));
  if (r.has("seed")) {
    const auto& s = r.raw("seed");
    if (!s.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.output_dir = r.text("output_dir", cfg.output_dir);
  parse_theory(r, cfg);
  cfg.timing = r.flag("timing", cfg.timing);
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string Variant::label() const {
  std::string s = algorithm == protocol::Algorithm::bcsl ? "BCSL-" : "BCSLp-";
  s += agg::short_name(rule.kind);
  return s;
}

std::vector<Variant> expand_variants(const RunConfig& config) {
  std::vector<Variant> out;
  for (auto a : config.algorithms)
    for (auto i : config.inits)
      for (auto k : config.rules) {
        Variant v;
        v.algorithm = a;
        v.init = i;
        v.rule = {k, k == agg::AggRule::Kind::trimmed ? config.beta : 0.0};
        out.push_back(v);
      }
  return out;
}

bool ExperimentResult::aborted() const {
  for (const auto& r : replicates) {
    if (!r.error.empty()) return true;
    for (const auto& t : r.traces)
      if (t.aborted) return true;
  }
  return false;
}

ExperimentResult run_experiment(const RunConfig& config, bool baseline_only) {
  config.validate();
  ExperimentResult res;
  res.config = config;
  res.variants = expand_variants(config);

  std::optional<Dataset> csv_data;
  if (!config.data.synthetic) {
    try {
      csv_data = data::load_csv(config.data.csv);
    } catch (const std::runtime_error& e) {
      throw ConfigError("data.path", e.what());
    }
  }
  const std::size_t rows = config.data.synthetic ? config.data.synth.N : csv_data->rows();
  const std::size_t needed = config.data.test_size + (config.m + 1) * config.n;
  const std::size_t feasible =
      data::max_feasible_shard_size(rows, config.data.test_size, config.m);
  res.requested_n = config.n;
  res.effective_n = config.n;
  if (needed > rows) {
    if (config.shard_policy == data::ShardPolicy::strict || feasible == 0)
      throw ConfigError("topology.n", "needs " + std::to_string(needed) + " rows but only " +
                                          std::to_string(rows) + " exist; max feasible n is " +
                                          std::to_string(feasible));
    res.effective_n = feasible;
    res.clipped = true;
    res.warnings.push_back("shard size clipped from " + std::to_string(config.n) + " to " +
                           std::to_string(feasible) + " so that (m + 1) n fits the data");
  }
  if (config.lambda.mode == LambdaSpec::Mode::glm_default &&
      model_dim(config, csv_data ? &*csv_data : nullptr) > config.theory.max_hessian_dim)
    throw ConfigError("algo.lambda", "glm_default needs dimension <= theory.max_hessian_dim");
  if (!baseline_only && config.alpha > config.beta &&
      std::find(config.rules.begin(), config.rules.end(), agg::AggRule::Kind::trimmed) !=
          config.rules.end())
    res.warnings.push_back("alpha exceeds beta; the trimmed mean may break down");

  res.replicates.resize(static_cast<std::size_t>(config.replicates));
  const Dataset* csv_ptr = csv_data ? &*csv_data : nullptr;
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < config.replicates; ++r) {
    auto& slot = res.replicates[static_cast<std::size_t>(r)];
    try {
      slot = run_replicate(config, res.variants, r, csv_ptr, baseline_only);
    } catch (const std::exception& e) {
      slot.replicate = r;
      slot.seed = config.seed + static_cast<std::uint64_t>(r);
      slot.error = e.what();
    }
  }

  for (const auto& rep : res.replicates) {
    const std::string tag = "replicate " + std::to_string(rep.replicate) + ": ";
    if (!rep.error.empty()) res.warnings.push_back(tag + "failed: " + rep.error);
    if (rep.error.empty() && !rep.centralized_converged)
      res.warnings.push_back(tag + "centralized solve hit the iteration cap");
    for (std::size_t v = 0; v < rep.traces.size(); ++v) {
      const auto& tr = rep.traces[v];
      const std::string who = tag + std::string(protocol::to_string(res.variants[v].init)) +
                              "/" + res.variants[v].label() + ": ";
      if (tr.aborted) res.warnings.push_back(who + "aborted: " + tr.error);
      if (tr.non_unique_flagged) res.warnings.push_back(who + "non-unique inner minimizer");
      int capped = 0;
      for (const auto& rec : tr.rounds) capped += rec.inner_converged ? 0 : 1;
      if (capped > 0)
        res.warnings.push_back(who + std::to_string(capped) +
                               " inner solves hit the iteration cap");
    }
  }
  return res;
}

std::string run_id(const RunConfig& config, protocol::InitKind init) {
  return config.name + "/" + std::string(protocol::to_string(init));
}

std::string metrics_csv(const ExperimentResult& result) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& rep : result.replicates) {
    for (std::size_t v = 0; v < rep.traces.size(); ++v) {
      const auto& var = result.variants[v];
      const std::string prefix = run_id(result.config, var.init) + "," +
                                 std::to_string(rep.replicate) + "," +
                                 std::string(protocol::to_string(var.algorithm)) + "," +
                                 std::string(agg::to_string(var.rule.kind));
      for (const auto& rec : rep.traces[v].rounds) {
        out += prefix;
        out += ',' + std::to_string(rec.t);
        append_optional(out, rec.err_star);
        append_optional(out, rec.err_hat);
        append_optional(out, rec.test_error);
        out += ',' + std::to_string(rec.inner_iters);
        append_optional(out, rec.elapsed_ms);
        out += '\n';
      }
    }
  }
  return out;
}

CurveStats curve(const ExperimentResult& result, std::size_t variant, Metric metric) {
  const std::size_t len = static_cast<std::size_t>(result.config.T) + 1;
  CurveStats s;
  s.mean.assign(len, std::numeric_limits<double>::quiet_NaN());
  s.stddev.assign(len, 0.0);
  s.count.assign(len, 0);
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<double> vals;
    for (const auto& rep : result.replicates) {
      if (variant >= rep.traces.size()) continue;
      const auto& rounds = rep.traces[variant].rounds;
      if (t >= rounds.size()) continue;
      const auto& rec = rounds[t];
      const auto& v = metric == Metric::err_star ? rec.err_star
                      : metric == Metric::err_hat ? rec.err_hat
                                                  : rec.test_error;
      if (v) vals.push_back(*v);
    }
    const auto [mean, sd] = mean_std(vals);
    if (!vals.empty()) s.mean[t] = mean;
    s.stddev[t] = sd;
    s.count[t] = static_cast<int>(vals.size());
  }
  return s;
}

std::string summary_json(const ExperimentResult& result) {
  const auto& cfg = result.config;
  ojson j;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["replicates"] = cfg.replicates;
  j["T"] = cfg.T;
  j["m"] = cfg.m;
  j["requested_n"] = result.requested_n;
  j["effective_n"] = result.effective_n;
  j["clipped"] = result.clipped;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["attack"] = {{"kind", std::string(adversary::to_string(cfg.attack.kind))},
                 {"param", cfg.attack.param}};
  j["aborted"] = result.aborted();

  std::vector<double> c_err, c_test;
  ojson per_rep = ojson::array();
  for (const auto& rep : result.replicates) {
    ojson e;
    e["replicate"] = rep.replicate;
    e["seed"] = rep.seed;
    if (!rep.error.empty()) {
      e["error"] = rep.error;
      per_rep.push_back(e);
      continue;
    }
    e["gamma"] = rep.gamma;
    e["centralized_converged"] = rep.centralized_converged;
    e["centralized_err_star"] =
        rep.centralized_err_star ? ojson(*rep.centralized_err_star) : ojson(nullptr);
    e["centralized_test_error"] =
        rep.centralized_test_error ? ojson(*rep.centralized_test_error) : ojson(nullptr);
    e["lambdas"] = rep.lambdas;
    if (rep.centralized_err_star) c_err.push_back(*rep.centralized_err_star);
    if (rep.centralized_test_error) c_test.push_back(*rep.centralized_test_error);
    if (rep.theory) {
      const auto& th = *rep.theory;
      ojson t;
      t["V"] = th.params.V;
      t["S"] = th.params.S;
      t["upsilon"] = th.params.upsilon;
      t["L_tilde"] = th.params.L_tilde;
      t["D"] = th.params.D;
      t["epsilon"] = th.params.epsilon;
      if (th.homogeneity_estimated) {
        t["rho"] = th.params.rho;
        t["delta"] = th.params.delta;
      }
      t["median_bound"] = bound_json(th.median_bound);
      t["trimmed_bound"] = bound_json(th.trimmed_bound);
      t["suggested_lambda_linear_pn"] = th.suggested_lambda_linear_pn;
      if (th.suggested_lambda_glm) t["suggested_lambda_glm"] = *th.suggested_lambda_glm;
      e["theory"] = t;
    }
    per_rep.push_back(e);
  }
  ojson central;
  const auto [ce_mean, ce_sd] = mean_std(c_err);
  const auto [ct_mean, ct_sd] = mean_std(c_test);
  central["err_star"] = c_err.empty() ? ojson(nullptr) : ojson{{"mean", ce_mean}, {"std", ce_sd}};
  central["test_error"] =
      c_test.empty() ? ojson(nullptr) : ojson{{"mean", ct_mean}, {"std", ct_sd}};
  j["centralized"] = central;
  j["per_replicate"] = per_rep;

  ojson variants = ojson::array();
  for (std::size_t v = 0; v < result.variants.size(); ++v) {
    const auto& var = result.variants[v];
    ojson e;
    e["run_id"] = run_id(cfg, var.init);
    e["algo"] = std::string(protocol::to_string(var.algorithm));
    e["rule"] = std::string(agg::to_string(var.rule.kind));
    e["init"] = std::string(protocol::to_string(var.init));
    e["label"] = var.label();
    if (var.rule.kind == agg::AggRule::Kind::trimmed) e["beta"] = var.rule.beta;
    e["err_star"] = stats_json(curve(result, v, Metric::err_star));
    e["err_hat"] = stats_json(curve(result, v, Metric::err_hat));
    e["test_error"] = stats_json(curve(result, v, Metric::test_error));
    variants.push_back(e);
  }
  j["variants"] = variants;
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

ExecuteResult write_outputs(const ExperimentResult& result) {
  ExecuteResult out;
  const std::filesystem::path dir(result.config.output_dir);
  std::filesystem::create_directories(dir);
  out.metrics_path = dir / (result.config.name + "_metrics.csv");
  out.summary_path = dir / (result.config.name + "_summary.json");
  {
    std::ofstream f(out.metrics_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.metrics_path.string());
    f << metrics_csv(result);
  }
  {
    std::ofstream f(out.summary_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.summary_path.string());
    f << summary_json(result);
  }
  out.aborted = result.aborted();
  for (const auto& rep : result.replicates) {
    if (!rep.error.empty()) out.errors.push_back(rep.error);
    for (const auto& t : rep.traces)
      if (t.aborted) out.errors.push_back(t.error);
  }
  return out;
}

ExecuteResult execute(const RunConfig& config) { return write_outputs(run_experiment(config)); }

std::size_t SuiteSummary::series_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.series.size();
  return n;
}

SuiteSummary summarize_suite(const std::vector<ExperimentResult>& results) {
  if (results.empty()) throw std::invalid_argument("compare_suite: empty config list");
  SuiteSummary s;
  s.T = results.front().config.T;
  for (const auto& r : results) {
    if (r.config.T != s.T)
      throw std::invalid_argument("compare_suite: mismatched T (" + std::to_string(r.config.T) +
                                  " vs " + std::to_string(s.T) + ") in '" + r.config.name + "'");
    if (r.config.seed != results.front().config.seed)
      s.warnings.push_back("'" + r.config.name + "' uses a different seed");
    SuiteBlock b;
    b.name = r.config.name;
    b.n = r.config.n;
    b.effective_n = r.effective_n;
    b.m = r.config.m;
    std::vector<double> best;
    for (const auto& rep : r.replicates)
      if (rep.centralized_err_star) best.push_back(*rep.centralized_err_star);
    if (!best.empty()) b.best_line = mean_std(best).first;
    for (std::size_t v = 0; v < r.variants.size(); ++v) {
      b.series.push_back(std::string(protocol::to_string(r.variants[v].init)) + "/" +
                         r.variants[v].label());
      b.err_star_mean.push_back(curve(r, v, Metric::err_star).mean);
      b.err_hat_mean.push_back(curve(r, v, Metric::err_hat).mean);
    }
    s.blocks.push_back(std::move(b));
  }
  return s;
}

SuiteSummary compare_suite(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw std::invalid_argument("compare_suite: empty config list");
  for (const auto& c : configs)
    if (c.T != configs.front().T)
      throw std::invalid_argument("compare_suite: mismatched T in '" + c.name + "'");
  std::vector<ExperimentResult> results;
  for (const auto& c : configs) results.push_back(run_experiment(c));
  return summarize_suite(results);
}

std::string suite_json(const SuiteSummary& suite) {
  ojson j;
  j["T"] = suite.T;
  ojson blocks = ojson::array();
  for (const auto& b : suite.blocks) {
    ojson e;
    e["name"] = b.name;
    e["n"] = b.n;
    e["effective_n"] = b.effective_n;
    e["m"] = b.m;
    e["best_line"] = b.best_line ? ojson(*b.best_line) : ojson(nullptr);
    ojson series = ojson::array();
    for (std::size_t i = 0; i < b.series.size(); ++i)
      series.push_back({{"series", b.series[i]},
                        {"err_star_mean", b.err_star_mean[i]},
                        {"err_hat_mean", b.err_hat_mean[i]}});
    e["series"] = series;
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  j["warnings"] = suite.warnings;
  return j.dump(2) + "\n";
}

}  // namespace bcsl::exp
