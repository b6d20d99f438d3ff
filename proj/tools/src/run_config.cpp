// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc_cli/run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <string_view>

#include "json.hpp"
#include "lcc/error.hpp"

namespace lcc::cli {
namespace {

using Json = nlohmann::json;

void reject_unknown(const Json& obj, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  const std::set<std::string_view> keys(known);
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) {
      throw ConfigError("unknown config key '" + where + key + "'");
    }
  }
}

const Json& object_field(const Json& obj, const std::string& name) {
  const Json& v = obj.at(name);
  if (!v.is_object()) throw ConfigError(name + " must be an object");
  return v;
}

double get_real(const Json& obj, const std::string& key, const std::string& name) {
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(name + " must be finite");
  return x;
}

std::uint64_t get_unsigned(const Json& obj, const std::string& key, const std::string& name) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    throw ConfigError(name + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

int get_int(const Json& obj, const std::string& key, const std::string& name) {
  const std::uint64_t v = get_unsigned(obj, key, name);
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ConfigError(name + " is too large");
  }
  return static_cast<int>(v);
}

std::string get_string(const Json& obj, const std::string& key, const std::string& name) {
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(name + " must be a string");
  return v.get<std::string>();
}

void parse_prior(const Json& j, RunConfig& cfg) {
  reject_unknown(j, "prior.", {"variant", "sigma0_sq"});
  if (!j.contains("variant")) throw ConfigError("prior.variant is required");
  cfg.prior_variant = parse_prior_variant(get_string(j, "variant", "prior.variant"));
  if (cfg.prior_variant == PriorVariant::gaussian) {
    if (!j.contains("sigma0_sq")) throw ConfigError("prior.sigma0_sq is required");
    const Json& s = j.at("sigma0_sq");
    if (s.is_string()) {
      if (s.get<std::string>() != "threshold") {
        throw ConfigError("prior.sigma0_sq must be a positive number or \"threshold\"");
      }
      cfg.sigma0_sq.reset();
    } else {
      const double v = get_real(j, "sigma0_sq", "prior.sigma0_sq");
      if (!(v > 0.0)) throw ConfigError("prior.sigma0_sq must be positive");
      cfg.sigma0_sq = v;
    }
  } else if (j.contains("sigma0_sq")) {
    throw ConfigError("prior.sigma0_sq applies only to the gaussian prior");
  }
}

void parse_chain(const Json& j, ChainConfig& c) {
  reject_unknown(j, "chain.",
                 {"step_size", "burn_in", "thinning", "n_steps", "inner_budget",
                  "inner_step_size", "inner_burn_in", "inner_thinning", "warm_start"});
  if (j.contains("step_size")) c.step_size = get_real(j, "step_size", "chain.step_size");
  if (j.contains("burn_in")) c.burn_in = get_unsigned(j, "burn_in", "chain.burn_in");
  if (j.contains("thinning")) c.thinning = get_unsigned(j, "thinning", "chain.thinning");
  if (j.contains("n_steps")) c.n_steps = get_unsigned(j, "n_steps", "chain.n_steps");
  if (j.contains("inner_budget")) {
    c.inner_budget = get_unsigned(j, "inner_budget", "chain.inner_budget");
  }
  if (j.contains("inner_step_size")) {
    c.inner_step_size = get_real(j, "inner_step_size", "chain.inner_step_size");
  }
  if (j.contains("inner_burn_in")) {
    c.inner_burn_in = get_unsigned(j, "inner_burn_in", "chain.inner_burn_in");
  }
  if (j.contains("inner_thinning")) {
    c.inner_thinning = get_unsigned(j, "inner_thinning", "chain.inner_thinning");
  }
  if (j.contains("warm_start")) {
    if (!j.at("warm_start").is_boolean()) throw ConfigError("chain.warm_start must be a boolean");
    c.warm_start = j.at("warm_start").get<bool>();
  }
}

void parse_verify(const Json& j, VerifyConfig& v) {
  reject_unknown(j, "verify.",
                 {"hessian_points", "xi_draws", "inner_samples", "eps_stat", "bound_points",
                  "variance_multipliers"});
  if (j.contains("hessian_points")) {
    v.hessian_points = get_unsigned(j, "hessian_points", "verify.hessian_points");
  }
  if (j.contains("xi_draws")) v.xi_draws = get_unsigned(j, "xi_draws", "verify.xi_draws");
  if (j.contains("inner_samples")) {
    v.inner_samples = get_unsigned(j, "inner_samples", "verify.inner_samples");
    if (v.inner_samples < 2) throw ConfigError("verify.inner_samples must be >= 2");
  }
  if (j.contains("eps_stat")) {
    v.eps_stat = get_real(j, "eps_stat", "verify.eps_stat");
    if (v.eps_stat < 0.0) throw ConfigError("verify.eps_stat must be non-negative");
  }
  if (j.contains("bound_points")) {
    v.bound_points = get_unsigned(j, "bound_points", "verify.bound_points");
  }
  if (j.contains("variance_multipliers")) {
    const Json& a = j.at("variance_multipliers");
    if (!a.is_array() || a.empty()) {
      throw ConfigError("verify.variance_multipliers must be a non-empty array");
    }
    v.variance_multipliers.clear();
    for (const Json& e : a) {
      if (!e.is_number() || !(e.get<double>() > 0.0)) {
        throw ConfigError("verify.variance_multipliers entries must be positive numbers");
      }
      v.variance_multipliers.push_back(e.get<double>());
    }
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, "", {"dataset_path", "prior", "activation", "alpha", "beta", "K", "L",
                         "chain", "seed", "residuals", "verify", "threads", "output_dir"});

  RunConfig cfg;
  if (!j.contains("dataset_path")) throw ConfigError("dataset_path is required");
  cfg.dataset_path = get_string(j, "dataset_path", "dataset_path");
  if (cfg.dataset_path.is_relative()) cfg.dataset_path = base_dir / cfg.dataset_path;

  if (!j.contains("prior")) throw ConfigError("prior is required");
  parse_prior(object_field(j, "prior"), cfg);
  if (j.contains("activation")) {
    cfg.activation = parse_activation_kind(get_string(j, "activation", "activation"));
  }
  if (j.contains("alpha")) cfg.alpha = get_real(j, "alpha", "alpha");
  if (j.contains("beta")) cfg.beta = get_real(j, "beta", "beta");
  if (j.contains("K")) cfg.K = get_int(j, "K", "K");
  if (j.contains("L")) cfg.L = get_int(j, "L", "L");
  if (j.contains("chain")) parse_chain(object_field(j, "chain"), cfg.chain);
  if (j.contains("seed")) cfg.chain.seed = get_unsigned(j, "seed", "seed");
  if (j.contains("residuals")) {
    const Json& r = j.at("residuals");
    if (r.is_string()) {
      if (r.get<std::string>() != "y") {
        throw ConfigError("residuals must be \"y\" or an array of numbers");
      }
    } else if (r.is_array()) {
      std::vector<double> vals;
      for (const Json& e : r) {
        if (!e.is_number() || !std::isfinite(e.get<double>())) {
          throw ConfigError("residuals must contain finite numbers");
        }
        vals.push_back(e.get<double>());
      }
      cfg.residuals = std::move(vals);
    } else {
      throw ConfigError("residuals must be \"y\" or an array of numbers");
    }
  }
  if (j.contains("verify")) parse_verify(object_field(j, "verify"), cfg.verify);
  if (j.contains("threads")) {
    const std::uint64_t t = get_unsigned(j, "threads", "threads");
    if (t > 1024) throw ConfigError("threads must be <= 1024");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (j.contains("output_dir")) {
    cfg.output_dir = get_string(j, "output_dir", "output_dir");
  }
  if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;

  HyperParams h;
  h.alpha = cfg.alpha.value_or(0.5);
  h.beta = cfg.beta;
  h.K = cfg.K;
  h.L = cfg.L;
  h.validate();
  cfg.chain.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_run_config(in, path.parent_path());
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["dataset_path"] = dataset_path.string();
  nlohmann::ordered_json prior;
  prior["variant"] = std::string(to_string(prior_variant));
  if (prior_variant == PriorVariant::gaussian) {
    if (sigma0_sq) {
      prior["sigma0_sq"] = *sigma0_sq;
    } else {
      prior["sigma0_sq"] = "threshold";
    }
  }
  j["prior"] = prior;
  j["activation"] = std::string(to_string(activation));
  if (alpha) {
    j["alpha"] = *alpha;
  } else {
    j["alpha"] = nullptr;
  }
  j["beta"] = beta;
  j["K"] = K;
  j["L"] = L;
  j["chain"] = {{"step_size", chain.step_size},
                {"burn_in", chain.burn_in},
                {"thinning", chain.thinning},
                {"n_steps", chain.n_steps},
                {"inner_budget", chain.inner_budget},
                {"inner_step_size", chain.inner_step_size},
                {"inner_burn_in", chain.inner_burn_in},
                {"inner_thinning", chain.inner_thinning},
                {"warm_start", chain.warm_start}};
  j["seed"] = chain.seed;
  if (residuals) {
    j["residuals"] = *residuals;
  } else {
    j["residuals"] = "y";
  }
  j["verify"] = {{"hessian_points", verify.hessian_points},
                 {"xi_draws", verify.xi_draws},
                 {"inner_samples", verify.inner_samples},
                 {"eps_stat", verify.eps_stat},
                 {"bound_points", verify.bound_points},
                 {"variance_multipliers", verify.variance_multipliers}};
  j["threads"] = threads;
  j["output_dir"] = output_dir.string();
  return j.dump();
}

}  // namespace lcc::cli
