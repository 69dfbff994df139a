#pragma once

// Monte Carlo experiment: per realization draw Gaussian channels, solve the
// relaxation, round with T trials and record v_rounded / v_relaxation.
// Realization r uses key derive_key(seed, r) for both its channels and its
// trials, so the report does not depend on how realizations are scheduled.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mbqcqp/bounds.hpp"
#include "mbqcqp/core_types.hpp"
#include "mbqcqp/instance_io.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rng.hpp"
#include "mbqcqp/rounding.hpp"

namespace mbqcqp {

/// Real: i.i.d. N(0, 1). Complex: real and imaginary parts i.i.d. N(0, 1/2).
inline std::vector<Channel> generate_channels(std::size_t M, Eigen::Index N, Field field, RandomStream& rng) {
  std::vector<Channel> out;
  const double r = std::sqrt(0.5);
  for (std::size_t i = 0; i < M; ++i) {
    Eigen::VectorXcd h(N);
    for (Eigen::Index k = 0; k < N; ++k) {
      if (field == Field::Real) {
        h(k) = cplx(rng.normal(), 0.0);
      } else {
        const double a = rng.normal();
        const double b = rng.normal();
        h(k) = cplx(r * a, r * b);
      }
    }
    out.push_back({h});
  }
  return out;
}

inline constexpr const char* kOutputDirEnv = "MBQCQP_OUTPUT_DIR";

inline std::string default_output_dir() {
  const char* v = std::getenv(kOutputDirEnv);
  return v && *v ? v : "mbqcqp_out";
}

struct ExperimentConfig {
  Model model = Model::P1;
  Field field = Field::Real;
  std::size_t M = 5;
  Eigen::Index N = 4;
  int Q = 2;             // P2 only
  std::vector<int> P;    // P2 only; one entry is broadcast to every user
  std::size_t realizations = 300;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string output_dir;
  unsigned threads = 1;
  SolverOptions solver{};
};

struct RealizationResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double v_sdp = 0.0;
  double v_ubqp = 0.0;
  double ratio = 0.0;
  double success_freq = 0.0;
  bool within_bound = false;
  json instance;
  RoundedSolution solution;
};

struct RatioStats {
  std::size_t count = 0;
  double min = 0.0, max = 0.0, mean = 0.0, std = 0.0;  // std uses n - 1
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges
  std::vector<std::size_t> counts;
};

struct ExperimentReport {
  ExperimentConfig config;
  BoundReport bound;
  std::vector<RealizationResult> realizations;
  std::vector<double> ratios;  // successful realizations, in order
  RatioStats stats;
  Histogram histogram;
  std::size_t failures = 0;
};

inline RatioStats compute_stats(const std::vector<double>& x) {
  RatioStats s;
  s.count = x.size();
  if (x.empty()) return s;
  s.min = *std::min_element(x.begin(), x.end());
  s.max = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(x.size() - 1));
  }
  return s;
}

/// Equal-width bins over [1, max]; a degenerate range becomes [1, 1 + 1e-6].
/// Values below 1 land in the first bin.
inline Histogram make_histogram(const std::vector<double>& x, std::size_t bins = 30) {
  Histogram h;
  double hi = 1.0;
  for (double v : x) hi = std::max(hi, v);
  if (hi <= 1.0) hi = 1.0 + 1e-6;
  const double lo = 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + width * static_cast<double>(b));
  h.counts.assign(bins, 0);
  for (double v : x) {
    const double pos = (v - lo) / width;
    const auto b = pos <= 0.0 ? std::size_t{0} : std::min(bins - 1, static_cast<std::size_t>(pos));
    ++h.counts[b];
  }
  return h;
}

inline std::vector<int> expanded_priorities(const ExperimentConfig& cfg) {
  if (cfg.P.size() == 1) return std::vector<int>(cfg.M, cfg.P[0]);
  if (cfg.P.empty()) return std::vector<int>(cfg.M, 1);
  return cfg.P;
}

inline BoundReport experiment_bound(const ExperimentConfig& cfg) {
  return cfg.model == Model::P1 ? mu_p1(cfg.M, cfg.field) : mu_p2(expanded_priorities(cfg), cfg.Q, cfg.field);
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.realizations < 1) throw Error(ErrorCode::InvalidInput, "realizations must be at least 1");
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be at least 1");
  if (cfg.M < 1 || cfg.N < 1) throw Error(ErrorCode::InvalidInput, "M and N must be positive");
  if (cfg.model == Model::P2) {
    const auto P = expanded_priorities(cfg);
    if (P.size() != cfg.M) throw Error(ErrorCode::InvalidInput, "need one priority per user");
    for (int p : P)
      if (p < 1 || p > cfg.Q) throw Error(ErrorCode::InvalidInput, "priorities must lie in [1, Q]");
  }
}

inline RealizationResult run_realization(const ExperimentConfig& cfg, std::size_t r) {
  RealizationResult out;
  out.index = r;
  out.seed = derive_key(cfg.seed, r);
  RandomStream rng(out.seed, kChannelStream);
  auto channels = generate_channels(cfg.M, cfg.N, cfg.field, rng);
  double events = 0.0;
  try {
    RelaxationSolution relax;
    if (cfg.model == Model::P1) {
      InstanceP1 inst{cfg.field, cfg.N, std::move(channels)};
      out.instance = to_json(inst);
      relax = solve_relaxation(inst, cfg.solver);
      out.solution = round_p1(inst, relax, cfg.trials, out.seed);
    } else {
      InstanceP2 inst{cfg.field, cfg.N, std::move(channels), cfg.Q, expanded_priorities(cfg)};
      out.instance = to_json(inst);
      relax = solve_relaxation(inst, cfg.solver);
      out.solution = round_p2(inst, relax, cfg.trials, out.seed);
    }
    events = static_cast<double>(out.solution.success_events);
    if (!out.solution.success) throw Error(ErrorCode::DegenerateCovariance, "no feasible trial");
    out.v_sdp = relax.objective;
    out.v_ubqp = out.solution.objective;
    out.ratio = out.v_ubqp / out.v_sdp;
    out.success_freq = events / static_cast<double>(cfg.trials);
    out.within_bound = check_ratio(out.v_ubqp, out.v_sdp, experiment_bound(cfg)).satisfied;
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentReport rep;
  rep.config = cfg;
  rep.bound = experiment_bound(cfg);
  rep.realizations.resize(cfg.realizations);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < cfg.realizations;) rep.realizations[r] = run_realization(cfg, r);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.realizations)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& r : rep.realizations) {
    if (r.ok)
      rep.ratios.push_back(r.ratio);
    else
      ++rep.failures;
  }
  rep.stats = compute_stats(rep.ratios);
  rep.histogram = make_histogram(rep.ratios);
  return rep;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Config echo; worker count and output location are left out so reports
/// compare equal across machines and thread counts.
inline json config_to_json(const ExperimentConfig& cfg) {
  json j = {{"model", std::string(to_string(cfg.model))},
            {"field", std::string(to_string(cfg.field))},
            {"M", cfg.M},
            {"N", cfg.N},
            {"realizations", cfg.realizations},
            {"trials", cfg.trials},
            {"seed", cfg.seed},
            {"solver", {{"gap_tol", cfg.solver.gap_tol}, {"feas_tol", cfg.solver.feas_tol}, {"max_iter", cfg.solver.max_iter}}}};
  if (cfg.model == Model::P2) {
    j["Q"] = cfg.Q;
    j["P"] = expanded_priorities(cfg);
  }
  return j;
}

inline json report_to_json(const ExperimentReport& rep) {
  json failed = json::array();
  std::size_t violations = 0;
  for (const auto& r : rep.realizations) {
    if (!r.ok) failed.push_back({{"realization", r.index}, {"seed", r.seed}, {"error", r.error}});
    if (r.ok && !r.within_bound) ++violations;
  }
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rep.realizations) seeds.push_back(r.seed);
  return {{"config", config_to_json(rep.config)},
          {"bound", {{"mu", rep.bound.mu}, {"alpha_thresh", rep.bound.alpha_thresh}, {"sigma", rep.bound.sigma}}},
          {"stats",
           {{"count", rep.stats.count},
            {"min", rep.stats.min},
            {"max", rep.stats.max},
            {"mean", rep.stats.mean},
            {"std", rep.stats.std},
            {"std_convention", "sample (n - 1)"}}},
          {"failures", rep.failures},
          {"failed_realizations", failed},
          {"bound_violations", violations},
          {"realization_seeds", seeds}};
}

/// report.json, ratios.csv, histogram.csv and solutions.jsonl under `dir`.
inline void write_report(const ExperimentReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report_to_json(rep).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "ratios.csv", std::ios::binary);
    out << "realization,seed,v_sdp,v_ubqp,ratio,success_freq\n";
    for (const auto& r : rep.realizations)
      if (r.ok)
        out << r.index << ',' << r.seed << ',' << format_double(r.v_sdp) << ',' << format_double(r.v_ubqp) << ','
            << format_double(r.ratio) << ',' << format_double(r.success_freq) << '\n';
  }
  {
    std::ofstream out(dir / "histogram.csv", std::ios::binary);
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < rep.histogram.counts.size(); ++b)
      out << format_double(rep.histogram.edges[b]) << ',' << format_double(rep.histogram.edges[b + 1]) << ','
          << rep.histogram.counts[b] << '\n';
  }
  {
    std::ofstream out(dir / "solutions.jsonl", std::ios::binary);
    for (const auto& r : rep.realizations)
      if (r.ok)
        out << json{{"realization", r.index},
                    {"seed", r.seed},
                    {"v_sdp", r.v_sdp},
                    {"instance", r.instance},
                    {"solution", to_json(r.solution, rep.config.field)}}
                   .dump()
            << '\n';
  }
}

}  // namespace mbqcqp
