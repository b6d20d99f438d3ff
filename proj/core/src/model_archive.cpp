// Copyright 2026 The lcc Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lcc/dataset_io.hpp"
#include "lcc/error.hpp"
#include "lcc/greedy_bayes.hpp"

namespace lcc {
namespace {

constexpr const char* kMagic = "lcc-model";
constexpr int kFormatVersion = 1;

double parse_field(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DataError("model archive line " + std::to_string(line_no) + ": bad number '" +
                    std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_model(std::ostream& out, const GreedyBayesModel& model) {
  const SampleStore& store = model.store;
  nlohmann::ordered_json meta;
  meta["n"] = store.n();
  meta["d"] = store.d();
  meta["K"] = store.K();
  meta["L"] = store.L();
  meta["alpha"] = model.hyper.alpha;
  meta["beta"] = model.hyper.beta;
  meta["activation"] = std::string(to_string(model.act.kind()));
  meta["curvature"] = model.act.curvature();
  meta["prior"] = {{"variant", std::string(to_string(model.prior.variant))}};
  if (model.prior.is_gaussian()) meta["prior"]["sigma0_sq"] = model.prior.sigma0_sq;

  out << kMagic << ' ' << kFormatVersion << '\n';
  out << meta.dump() << '\n';
  out << "i,k,l";
  for (int j = 1; j <= store.d(); ++j) out << ",w" << j;
  out << '\n';
  for (const auto& [key, draws] : store.lists()) {
    for (std::size_t l = 0; l < draws.size(); ++l) {
      out << key.first << ',' << key.second << ',' << (l + 1);
      for (Eigen::Index j = 0; j < draws[l].size(); ++j) {
        out << ',' << format_double(draws[l](j));
      }
      out << '\n';
    }
  }
}

GreedyBayesModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("model archive is empty");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != kMagic) throw DataError("not an lcc model archive");
    if (version != kFormatVersion) {
      throw DataError("unsupported model archive version " + std::to_string(version));
    }
  }
  if (!std::getline(in, line)) throw DataError("model archive lacks metadata");
  ++line_no;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model archive metadata: ") + e.what());
  }

  GreedyBayesModel model;
  int n = 0, d = 0, K = 0, L = 0;
  try {
    n = meta.at("n").get<int>();
    d = meta.at("d").get<int>();
    K = meta.at("K").get<int>();
    L = meta.at("L").get<int>();
    model.hyper.alpha = meta.at("alpha").get<double>();
    model.hyper.beta = meta.at("beta").get<double>();
    model.hyper.K = K;
    model.hyper.L = L;
    const auto kind = parse_activation_kind(meta.at("activation").get<std::string>());
    const double c = meta.at("curvature").get<double>();
    model.act = c == curvature_constant(kind) ? Activation(kind)
                                              : Activation::with_curvature(kind, c);
    const auto& prior = meta.at("prior");
    model.prior = parse_prior_variant(prior.at("variant").get<std::string>()) ==
                          PriorVariant::gaussian
                      ? PriorSpec::gaussian(prior.at("sigma0_sq").get<double>())
                      : PriorSpec::uniform_l1();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model archive metadata: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("model archive metadata: ") + e.what());
  }
  model.store = SampleStore(n, K, L, d);

  if (!std::getline(in, line)) throw DataError("model archive lacks table header");
  ++line_no;

  std::map<std::pair<int, int>, std::vector<Vector>> lists;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (static_cast<int>(fields.size()) != d + 3) {
      throw DataError("model archive line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields");
    }
    const int i = static_cast<int>(parse_field(fields[0], line_no));
    const int k = static_cast<int>(parse_field(fields[1], line_no));
    Vector w(d);
    for (int j = 0; j < d; ++j) w(j) = parse_field(fields[static_cast<std::size_t>(j) + 3], line_no);
    lists[{i, k}].push_back(std::move(w));
  }
  // std::map orders by (i, k); insert stage by stage to respect recursion order.
  for (int k = 1; k <= K; ++k) {
    for (int i = 1; i <= n; ++i) {
      auto it = lists.find({i, k});
      if (it == lists.end()) continue;
      model.store.put(i, k, std::move(it->second));
      lists.erase(it);
    }
  }
  if (!lists.empty()) throw DataError("model archive contains out-of-range (i,k) keys");
  return model;
}

void save_model(const std::filesystem::path& path, const GreedyBayesModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model archive '" + path.string() + "'");
  write_model(out, model);
  if (!out) throw DataError("failed writing model archive '" + path.string() + "'");
}

GreedyBayesModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model archive '" + path.string() + "'");
  return read_model(in);
}

}  // namespace lcc
