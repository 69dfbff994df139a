#pragma once

// Command-line front end. Every command prints one JSON document on stdout;
// failures print {"error": {"code", "message"}} on stderr and return
// nonzero (2 for unreadable or malformed input, 1 otherwise).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbqcqp/bounds.hpp"
#include "mbqcqp/harness.hpp"
#include "mbqcqp/instance_io.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/rounding.hpp"

namespace mbqcqp {

namespace detail {

inline json bound_json(const BoundReport& b) {
  return {{"model", std::string(to_string(b.model))},
          {"field", std::string(to_string(b.field))},
          {"mu", b.mu},
          {"alpha_thresh", b.alpha_thresh},
          {"sigma", b.sigma}};
}

inline json matrix_json(const Eigen::MatrixXd& A) {
  json out = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline json beta_json(const Eigen::MatrixXi& B) {
  json out = json::array();
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < B.cols(); ++j) row.push_back(B(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Field parse_field(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw Error(ErrorCode::InvalidInput, "field must be real or complex");
}

inline Model parse_model(const std::string& s) {
  if (s == "p1") return Model::P1;
  if (s == "p2") return Model::P2;
  throw Error(ErrorCode::InvalidInput, "model must be p1 or p2");
}

struct SolveArgs {
  std::string instance;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string dump_sdp;
  bool raw = false;
};

template <typename Inst>
json solve_command(const Inst& inst, const SolveArgs& a) {
  require_valid(inst);
  SdpProblem<cplx> p;
  if constexpr (std::is_same_v<Inst, InstanceP1>)
    p = build_sdp1(inst);
  else
    p = build_sdp2(inst);
  const SdpProblem<double> real = prepare_for_solver(p, inst.field);
  if (!a.dump_sdp.empty()) {
    std::ofstream out(a.dump_sdp, std::ios::binary);
    out << to_json(real).dump(1) << '\n';
  }
  const SdpSolution sol = solve(real);
  const RelaxationSolution relax = extract_solution(inst, sol, kSolverTol, !a.raw);
  RoundedSolution rs;
  BoundReport bound;
  bool feasible = false;
  if constexpr (std::is_same_v<Inst, InstanceP1>) {
    rs = round_p1(inst, relax, a.trials, a.seed);
    bound = mu_p1(inst.M(), inst.field);
  } else {
    rs = round_p2(inst, relax, a.trials, a.seed);
    bound = mu_p2(inst.priorities, inst.Q, inst.field);
  }
  feasible = rs.success && is_feasible(inst, rs);
  json out = {{"relaxation",
               {{"objective", relax.objective},
                {"dual_objective", sol.dual_objective},
                {"duality_gap", relax.duality_gap},
                {"iterations", sol.iterations},
                {"alpha", matrix_json(relax.alpha)}}},
              {"rounded", to_json(rs, inst.field)},
              {"feasible", feasible},
              {"bound", bound_json(bound)}};
  if (rs.success && relax.objective > 0.0) {
    const RatioCheck c = check_ratio(rs.objective, relax.objective, bound);
    out["ratio"] = c.ratio;
    out["within_bound"] = c.satisfied;
  }
  return out;
}

inline int report_error(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << '\n';
  return exit_code;
}

}  // namespace detail

inline int cli_dispatch(int argc, char** argv) {
  using namespace detail;
  CLI::App app{"Mixed-binary multicast beamforming: SDP relaxation and randomized rounding"};
  app.require_subcommand(1);

  SolveArgs s1, s2;
  auto add_solve = [&](const char* name, const char* desc, SolveArgs& a) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("instance", a.instance, "instance JSON file")->required();
    c->add_option("--trials,-T", a.trials, "randomization trials")->check(CLI::PositiveNumber);
    c->add_option("--seed", a.seed, "trial stream key");
    c->add_option("--dump-sdp", a.dump_sdp, "write the real-form SDP as JSON");
    c->add_flag("--raw", a.raw, "keep the solver point instead of the slot-averaged one");
    return c;
  };
  auto* c_p1 = add_solve("solve-p1", "two-slot model", s1);
  auto* c_p2 = add_solve("solve-p2", "Q-slot model", s2);

  ExperimentConfig cfg;
  std::string ex_model = "p1", ex_field = "real";
  cfg.output_dir = default_output_dir();
  auto* c_ex = app.add_subcommand("experiment", "Monte Carlo ratio experiment");
  c_ex->add_option("--model", ex_model)->check(CLI::IsMember({"p1", "p2"}));
  c_ex->add_option("--field", ex_field)->check(CLI::IsMember({"real", "complex"}));
  c_ex->add_option("--M", cfg.M)->check(CLI::PositiveNumber);
  c_ex->add_option("--N", cfg.N)->check(CLI::PositiveNumber);
  c_ex->add_option("--Q", cfg.Q)->check(CLI::PositiveNumber);
  c_ex->add_option("--P", cfg.P, "priorities (one value is used for every user)");
  c_ex->add_option("--realizations", cfg.realizations)->check(CLI::PositiveNumber);
  c_ex->add_option("--trials,-T", cfg.trials)->check(CLI::PositiveNumber);
  c_ex->add_option("--seed", cfg.seed);
  c_ex->add_option("--output-dir,-o", cfg.output_dir, std::string("defaults to $") + kOutputDirEnv);
  c_ex->add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);

  std::string or_path;
  OracleOptions or_opt;
  auto* c_or = app.add_subcommand("oracle", "enumeration bracket for a small instance");
  c_or->add_option("instance", or_path)->required();
  c_or->add_option("--trials,-T", or_opt.trials)->check(CLI::PositiveNumber);
  c_or->add_option("--seed", or_opt.seed);
  c_or->add_option("--threads", or_opt.threads)->check(CLI::PositiveNumber);

  std::string b_model = "p1", b_field;
  std::size_t b_M = 0;
  int b_N = 0, b_Q = 2;
  std::vector<int> b_P;
  auto* c_b = app.add_subcommand("bounds", "approximation constants");
  c_b->add_option("--model", b_model)->check(CLI::IsMember({"p1", "p2"}));
  c_b->add_option("--field", b_field, "real or complex; both when omitted")->check(CLI::IsMember({"real", "complex"}));
  c_b->add_option("--M", b_M)->check(CLI::PositiveNumber);
  c_b->add_option("--N", b_N, "accepted for symmetry; the constants do not depend on N");
  c_b->add_option("--Q", b_Q)->check(CLI::PositiveNumber);
  c_b->add_option("--P", b_P);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    json out;
    if (c_p1->parsed() || c_p2->parsed()) {
      const SolveArgs& a = c_p1->parsed() ? s1 : s2;
      const Instance inst = load_instance(a.instance);
      if (c_p1->parsed()) {
        if (!std::holds_alternative<InstanceP1>(inst))
          throw Error(ErrorCode::ParseError, "solve-p1 needs a p1 instance");
        out = solve_command(std::get<InstanceP1>(inst), a);
      } else {
        if (!std::holds_alternative<InstanceP2>(inst))
          throw Error(ErrorCode::ParseError, "solve-p2 needs a p2 instance");
        out = solve_command(std::get<InstanceP2>(inst), a);
      }
    } else if (c_ex->parsed()) {
      cfg.model = parse_model(ex_model);
      cfg.field = parse_field(ex_field);
      const ExperimentReport rep = run_experiment(cfg);
      write_report(rep, cfg.output_dir);
      out = report_to_json(rep);
      out["output_dir"] = cfg.output_dir;
    } else if (c_or->parsed()) {
      const Instance inst = load_instance(or_path);
      const OracleBracket b = std::visit(
          [&](const auto& i) {
            if constexpr (std::is_same_v<std::decay_t<decltype(i)>, InstanceP1>)
              return enumerate_p1(i, or_opt);
            else
              return enumerate_p2(i, or_opt);
          },
          inst);
      const Field f = std::visit([](const auto& i) { return i.field; }, inst);
      json w = json::array();
      for (const auto& v : b.upper_w) w.push_back(vector_to_json(v, f));
      out = {{"lower", b.lower},
             {"upper", b.upper},
             {"certified", b.certified},
             {"assignments", b.assignments},
             {"argmin_beta", beta_json(b.argmin_beta)},
             {"upper_w", w}};
    } else if (c_b->parsed()) {
      const Model model = parse_model(b_model);
      std::vector<Field> fields;
      if (b_field.empty())
        fields = {Field::Real, Field::Complex};
      else
        fields = {parse_field(b_field)};
      std::vector<int> P = b_P;
      if (model == Model::P1 && b_M == 0) throw Error(ErrorCode::InvalidInput, "--M is required");
      if (model == Model::P2) {
        if (P.empty()) P = {1};
        if (P.size() == 1 && b_M > 1) P.assign(b_M, P[0]);
        if (b_M != 0 && P.size() != b_M) throw Error(ErrorCode::InvalidInput, "--P needs one value or M values");
      }
      out = json::array();
      for (Field f : fields) out.push_back(bound_json(model == Model::P1 ? mu_p1(b_M, f) : mu_p2(P, b_Q, f)));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.code())), e.what(), e.code() == ErrorCode::ParseError ? 2 : 1);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), 1);
  }
}

}  // namespace mbqcqp
