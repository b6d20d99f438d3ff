// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include "lcc_cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "lcc/check_report.hpp"
#include "lcc/dataset_io.hpp"
#include "lcc/error.hpp"
#include "lcc/greedy_bayes.hpp"
#include "lcc/rng.hpp"
#include "lcc/samplers.hpp"
#include "lcc/verification.hpp"
#include "lcc_cli/run_config.hpp"

#ifndef LCC_VERSION
#define LCC_VERSION "unknown"
#endif

namespace lcc::cli {
namespace {

namespace fs = std::filesystem;
using OJson = nlohmann::ordered_json;

constexpr std::size_t kDefaultSampleCount = 100;

struct Run {
  RunConfig cfg;
  Dataset ds;
  fs::path out_dir;
  std::string dataset_digest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

Run prepare(const CommandOptions& opts) {
  Run run;
  run.cfg = load_run_config(opts.config_path);
  if (opts.seed) run.cfg.chain.seed = *opts.seed;
  run.out_dir = opts.out_dir ? *opts.out_dir : run.cfg.output_dir;
  run.ds = load_dataset_csv(run.cfg.dataset_path);
  run.dataset_digest = file_digest(run.cfg.dataset_path);
  return run;
}

double resolved_alpha(const Run& run) {
  return run.cfg.alpha.value_or(HyperParams::default_alpha(static_cast<int>(run.ds.n())));
}

Vector density_residuals(const Run& run) {
  if (!run.cfg.residuals) return run.ds.y;
  const auto& r = *run.cfg.residuals;
  if (static_cast<Eigen::Index>(r.size()) != run.ds.n()) {
    throw ConfigError("residuals has " + std::to_string(r.size()) + " entries, dataset has " +
                      std::to_string(run.ds.n()) + " rows");
  }
  return Eigen::Map<const Vector>(r.data(), static_cast<Eigen::Index>(r.size()));
}

// The small-variance threshold is evaluated on the full design with the
// given residuals.
PriorSpec resolve_prior(const Run& run, const Activation& act, const Vector& r) {
  if (run.cfg.prior_variant == PriorVariant::uniform_l1) return PriorSpec::uniform_l1();
  if (run.cfg.sigma0_sq) return PriorSpec::gaussian(*run.cfg.sigma0_sq);
  const DensitySpec probe(run.ds.X, r, act, resolved_alpha(run), PriorSpec::gaussian(1.0));
  const double thr = gaussian_variance_threshold(probe);
  if (!std::isfinite(thr)) {
    throw ConfigError("prior.sigma0_sq = \"threshold\" is undefined for zero residuals or design");
  }
  return PriorSpec::gaussian(thr);
}

void check_dataset(const Dataset& ds, const PriorSpec& prior) {
  const CheckReport rep = validate_dataset(ds, prior);
  if (!rep.passed) throw DataError("invalid dataset: " + rep.details);
}

OJson manifest(const Run& run, const std::string& command, const PriorSpec& prior,
               const Activation& act, double alpha, const std::vector<std::string>& outputs) {
  OJson m;
  m["tool"] = "lcc";
  m["version"] = LCC_VERSION;
  m["command"] = command;
  m["config"] = OJson::parse(run.cfg.to_json());
  m["seed"] = run.cfg.chain.seed;
  m["dataset_digest"] = run.dataset_digest;
  m["resolved"] = {{"alpha", alpha},
                   {"activation", std::string(to_string(act.kind()))},
                   {"curvature", act.curvature()},
                   {"prior", std::string(to_string(prior.variant))},
                   {"sigma0_sq", prior.is_gaussian() ? OJson(prior.sigma0_sq) : OJson(nullptr)},
                   {"n", run.ds.n()},
                   {"d", run.ds.d()}};
  m["outputs"] = outputs;
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - run.start;
  m["wall_time"] = wall.count();
  return m;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const CapabilityError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const InputError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const SamplerError& e) {
    err << "sampler error: " << e.what() << '\n';
    return kSamplerError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSamplerError;
  }
}

std::string samples_csv(const std::vector<Vector>& draws, int d) {
  std::ostringstream os;
  for (int j = 0; j < d; ++j) os << (j ? "," : "") << 'w' << (j + 1);
  os << '\n';
  for (const auto& w : draws) {
    for (int j = 0; j < d; ++j) os << (j ? "," : "") << format_double(w(j));
    os << '\n';
  }
  return os.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at " + path.string());
  }
}

int cmd_fit(const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    Run run = prepare(opts);
    const Activation act(run.cfg.activation);
    const PriorSpec prior = resolve_prior(run, act, run.ds.y);
    check_dataset(run.ds, prior);

    HyperParams hyper;
    hyper.alpha = resolved_alpha(run);
    hyper.beta = run.cfg.beta;
    hyper.K = run.cfg.K;
    hyper.L = run.cfg.L;
    hyper.validate();

    log << "fit: n=" << run.ds.n() << " d=" << run.ds.d() << " K=" << hyper.K
        << " L=" << hyper.L << " alpha=" << hyper.alpha << " prior=" << to_string(prior.variant)
        << '\n';
    FitOptions fo;
    fo.threads = run.cfg.threads;
    fo.on_stage = [&](int k, double mse) {
      log << "stage " << k << '/' << hyper.K << " mse=" << mse << std::endl;
    };
    const GreedyBayesModel model = fit(run.ds, hyper, act, prior, run.cfg.chain, fo);

    std::ostringstream archive;
    write_model(archive, model);
    std::ostringstream curve;
    curve << "stage,mse\n";
    const auto mse = training_curve(model, run.ds);
    for (std::size_t k = 0; k < mse.size(); ++k) curve << k << ',' << format_double(mse[k]) << '\n';

    ensure_dir(run.out_dir);
    write_file_atomic(run.out_dir / "model.lcc", archive.str());
    write_file_atomic(run.out_dir / "training_curve.csv", curve.str());
    const OJson m = manifest(run, "fit", prior, act, hyper.alpha,
                             {"model.lcc", "training_curve.csv", "manifest.json"});
    write_file_atomic(run.out_dir / "manifest.json", m.dump(2) + "\n");
    log << "wrote " << (run.out_dir / "model.lcc").string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_sample(const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    Run run = prepare(opts);
    const Activation act(run.cfg.activation);
    const Vector r = density_residuals(run);
    const PriorSpec prior = resolve_prior(run, act, r);
    check_dataset(run.ds, prior);
    const double alpha = resolved_alpha(run);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const DensitySpec spec(run.ds.X, r, act, alpha, prior);
    const std::size_t count = opts.count.value_or(kDefaultSampleCount);

    log << "sample: count=" << count << " d=" << spec.dim() << " rows=" << spec.rows()
        << " prior=" << to_string(prior.variant) << '\n';
    SamplerDiagnostics diag;
    const auto draws = draw_posterior_weights(spec, run.cfg.chain, count, &diag, run.cfg.threads);

    OJson dj;
    dj["count"] = count;
    dj["acceptance_rate"] = diag.acceptance_rate;
    dj["effective_sample_size"] =
        count > 0 ? effective_sample_size(draws) : std::vector<double>{};
    dj["n_evals"] = diag.n_evals;
    dj["outer_step_size"] =
        run.cfg.chain.step_size > 0.0 ? run.cfg.chain.step_size : default_outer_step(spec);
    if (prior.is_gaussian()) {
      dj["inner_step_size"] = run.cfg.chain.inner_step_size > 0.0 ? run.cfg.chain.inner_step_size
                                                                  : default_inner_step(spec);
    } else {
      dj["inner_step_size"] = nullptr;
    }

    ensure_dir(run.out_dir);
    write_file_atomic(run.out_dir / "samples.csv", samples_csv(draws, spec.dim()));
    write_file_atomic(run.out_dir / "diagnostics.json", dj.dump(2) + "\n");
    const OJson m = manifest(run, "sample", prior, act, alpha,
                             {"samples.csv", "diagnostics.json", "manifest.json"});
    write_file_atomic(run.out_dir / "manifest.json", m.dump(2) + "\n");
    log << "wrote " << count << " draws to " << (run.out_dir / "samples.csv").string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    Run run = prepare(opts);
    const Activation tight(run.cfg.activation);
    const Activation act = opts.negative_control
                               ? Activation::with_curvature(run.cfg.activation,
                                                            tight.curvature() / 10.0)
                               : tight;
    const Vector r = density_residuals(run);
    const PriorSpec prior = resolve_prior(run, tight, r);
    check_dataset(run.ds, prior);
    const double alpha = resolved_alpha(run);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const DensitySpec spec(run.ds.X, r, act, alpha, prior);
    const VerifyConfig& v = run.cfg.verify;
    const std::uint64_t seed = run.cfg.chain.seed;

    log << "verify: d=" << spec.dim() << " rows=" << spec.rows()
        << " prior=" << to_string(prior.variant) << " c=" << act.curvature()
        << (opts.negative_control ? " (negative control)" : "") << '\n';

    std::vector<CheckReport> reports;
    auto record = [&](CheckReport rep) {
      log << "check " << rep.check_name << ": " << (rep.passed ? "pass" : "FAIL")
          << (rep.informational ? " (informational)" : "") << " margin=" << rep.margin << '\n';
      reports.push_back(std::move(rep));
    };

    record(check_reverse_logconcavity(spec, v.hessian_points, stream_seed(seed, {1})));
    ChainConfig inner = run.cfg.chain.inner(v.inner_samples);
    inner.seed = stream_seed(seed, {2});
    record(check_cov_domination(spec, v.xi_draws, inner, v.eps_stat));
    inner.seed = stream_seed(seed, {3});
    record(check_xi_strict_logconcavity(spec, v.xi_draws, inner));
    if (prior.is_gaussian()) {
      const double thr = gaussian_variance_threshold(spec);
      if (std::isfinite(thr)) {
        std::vector<double> grid;
        for (double m : v.variance_multipliers) grid.push_back(m * thr);
        record(check_bl_bound(spec, v.bound_points, grid, stream_seed(seed, {4})));
      } else {
        log << "check bl_bound: skipped (vanishing residuals or design)\n";
      }
    }
    record(check_holder_ratio(spec));

    ensure_dir(run.out_dir);
    write_file_atomic(run.out_dir / "verify_report.json", reports_to_json(reports));
    OJson m = manifest(run, "verify", prior, act, alpha, {"verify_report.json", "manifest.json"});
    m["negative_control"] = opts.negative_control;
    write_file_atomic(run.out_dir / "manifest.json", m.dump(2) + "\n");

    bool ok = true;
    for (const auto& rep : reports) ok = ok && (rep.passed || rep.informational);
    log << (ok ? "all binding checks passed" : "verification failed") << '\n';
    return static_cast<int>(ok ? kOk : kVerificationFailed);
  });
}

}  // namespace lcc::cli
