#pragma once

// JSON instance files:
//
//   {"model": "p1" | "p2", "field": "real" | "complex", "N": 4, "M": 2,
//    "Q": 3, "P": [1, 2],                       (p2 only)
//    "channels": [[1, 0, 0, 0], [[0.5, -1], [0, 0], ...]]}
//
// Real entries are numbers; complex entries are [re, im] pairs (a bare
// number is accepted as a purely real complex entry).

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mbqcqp/core_types.hpp"

namespace mbqcqp {

using json = nlohmann::json;
using Instance = std::variant<InstanceP1, InstanceP2>;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline const json& require_key(const json& j, const char* key) {
  if (!j.contains(key)) parse_fail(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

inline long long require_int(const json& j, const char* key) {
  const json& v = require_key(j, key);
  if (!v.is_number_integer()) parse_fail(std::string("\"") + key + "\" must be an integer");
  return v.get<long long>();
}

inline cplx parse_entry(const json& e, Field field, std::size_t user, std::size_t k) {
  const std::string where = "channels[" + std::to_string(user) + "][" + std::to_string(k) + "]";
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (field == Field::Complex && e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  parse_fail(where + (field == Field::Real ? " must be a number" : " must be a number or an [re, im] pair"));
}

}  // namespace detail

inline Instance instance_from_json(const json& j) {
  using detail::parse_fail;
  if (!j.is_object()) parse_fail("instance must be a JSON object");
  const json& model = detail::require_key(j, "model");
  const json& field_j = detail::require_key(j, "field");
  if (!model.is_string() || (model != "p1" && model != "p2")) parse_fail("\"model\" must be \"p1\" or \"p2\"");
  if (!field_j.is_string() || (field_j != "real" && field_j != "complex"))
    parse_fail("\"field\" must be \"real\" or \"complex\"");
  const Field field = field_j == "real" ? Field::Real : Field::Complex;
  const long long N = detail::require_int(j, "N");
  const json& ch = detail::require_key(j, "channels");
  if (!ch.is_array()) parse_fail("\"channels\" must be an array");
  if (j.contains("M") && detail::require_int(j, "M") != static_cast<long long>(ch.size()))
    parse_fail("\"M\" does not match the number of channels");

  std::vector<Channel> channels;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (!ch[i].is_array()) parse_fail("channels[" + std::to_string(i) + "] must be an array");
    Eigen::VectorXcd h(static_cast<Eigen::Index>(ch[i].size()));
    for (std::size_t k = 0; k < ch[i].size(); ++k) h(static_cast<Eigen::Index>(k)) = detail::parse_entry(ch[i][k], field, i, k);
    channels.push_back({h});
  }
  if (model == "p1") return InstanceP1{field, static_cast<Eigen::Index>(N), std::move(channels)};

  InstanceP2 p2{field, static_cast<Eigen::Index>(N), std::move(channels), static_cast<int>(detail::require_int(j, "Q")), {}};
  const json& P = detail::require_key(j, "P");
  if (!P.is_array()) parse_fail("\"P\" must be an array");
  for (const auto& v : P) {
    if (!v.is_number_integer()) parse_fail("\"P\" entries must be integers");
    p2.priorities.push_back(v.get<int>());
  }
  return p2;
}

inline Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return instance_from_json(j);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline json channels_to_json(Field field, const std::vector<Channel>& channels) {
  json out = json::array();
  for (const auto& h : channels) {
    json row = json::array();
    for (Eigen::Index k = 0; k < h.size(); ++k) {
      if (field == Field::Real)
        row.push_back(h.entries(k).real());
      else
        row.push_back({h.entries(k).real(), h.entries(k).imag()});
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline json to_json(const InstanceP1& inst) {
  return {{"model", "p1"},
          {"field", std::string(to_string(inst.field))},
          {"N", inst.N},
          {"M", inst.M()},
          {"channels", channels_to_json(inst.field, inst.channels)}};
}

inline json to_json(const InstanceP2& inst) {
  return {{"model", "p2"},
          {"field", std::string(to_string(inst.field))},
          {"N", inst.N},
          {"M", inst.M()},
          {"Q", inst.Q},
          {"P", inst.priorities},
          {"channels", channels_to_json(inst.field, inst.channels)}};
}

inline json vector_to_json(const Eigen::VectorXcd& v, Field field) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (field == Field::Real)
      out.push_back(v(k).real());
    else
      out.push_back({v(k).real(), v(k).imag()});
  }
  return out;
}

inline Eigen::VectorXcd vector_from_json(const json& j, Field field) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = detail::parse_entry(j[k], field, 0, k);
  return v;
}

inline json to_json(const RoundedSolution& s, Field field) {
  json beta = json::array();
  for (Eigen::Index i = 0; i < s.beta.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index q = 0; q < s.beta.cols(); ++q) row.push_back(s.beta(i, q));
    beta.push_back(std::move(row));
  }
  json w = json::array();
  for (const auto& v : s.w_blocks) w.push_back(vector_to_json(v, field));
  return {{"beta", beta},
          {"w", w},
          {"objective", s.objective},
          {"trials_used", s.trials_used},
          {"success", s.success},
          {"success_events", s.success_events},
          {"degenerate_trials", s.degenerate_trials}};
}

/// Inverse of to_json(RoundedSolution) for the fields needed to re-verify.
inline RoundedSolution rounded_from_json(const json& j, Field field) {
  RoundedSolution s;
  const json& beta = detail::require_key(j, "beta");
  const auto rows = static_cast<Eigen::Index>(beta.size());
  const auto cols = rows ? static_cast<Eigen::Index>(beta[0].size()) : 0;
  s.beta.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index q = 0; q < cols; ++q) s.beta(i, q) = beta[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)].get<int>();
  for (const auto& w : detail::require_key(j, "w")) s.w_blocks.push_back(vector_from_json(w, field));
  s.objective = detail::require_key(j, "objective").get<double>();
  s.success = j.value("success", false);
  return s;
}

}  // namespace mbqcqp
