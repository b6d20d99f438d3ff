// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lcc_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lcc: Greedy Bayes fitting and two-stage posterior sampling"};
  app.require_subcommand(1);

  lcc::cli::CommandOptions opts;
  std::string config;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--out", out, "output directory");
  };
  CLI::App* fit = app.add_subcommand("fit", "run the Greedy Bayes recursion");
  add_common(fit);
  CLI::App* sample = app.add_subcommand("sample", "draw from a single posterior");
  add_common(sample);
  sample->add_option("--count", count, "number of draws");
  CLI::App* verify = app.add_subcommand("verify", "run the verification battery");
  add_common(verify);
  verify->add_flag("--negative-control", opts.negative_control,
                   "divide the curvature constant by 10");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lcc::cli::kConfigError;
  }

  opts.config_path = config;
  for (CLI::App* sub : {fit, sample, verify}) {
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out_dir = out;
  }
  if (sample->count("--count")) opts.count = count;

  if (*fit) return lcc::cli::cmd_fit(opts, std::cout, std::cerr);
  if (*sample) return lcc::cli::cmd_sample(opts, std::cout, std::cerr);
  return lcc::cli::cmd_verify(opts, std::cout, std::cerr);
}
