#pragma once

// JSON documents for input spaces, risk measures and fitted surrogates.
// Surrogates are stored by their defining data and rebuilt on load, so a loaded
// model predicts bit-identically to the one that was saved.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "gustuq/core.hpp"
#include "gustuq/dimension_reduction.hpp"
#include "gustuq/errors.hpp"
#include "gustuq/kriging.hpp"
#include "gustuq/pce.hpp"

namespace gustuq {

using json = nlohmann::json;

inline json to_json(const InputSpace& space) {
  json arr = json::array();
  for (const auto& in : space.inputs()) arr.push_back({{"name", in.name}, {"lower", in.lower}, {"upper", in.upper}});
  return arr;
}

inline InputSpace input_space_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("input space must be a JSON array");
  std::vector<UncertainInput> in;
  for (const auto& e : j) in.push_back({e.at("name").get<std::string>(), e.at("lower").get<double>(), e.at("upper").get<double>()});
  try {
    return InputSpace(std::move(in));
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

inline json to_json(const RiskMeasures& r) { return {{"mean", r.mean}, {"std_dev", r.std_dev}, {"p95", r.p95}}; }

inline RiskMeasures risk_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("std_dev").get<double>(), j.at("p95").get<double>()};
}

namespace detail {

inline json point_rows(const PointSet& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.cols(); ++j) row.push_back(p(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline PointSet point_rows_from_json(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
  PointSet p(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != d) throw ConfigError("ragged point array");
    for (Eigen::Index j = 0; j < d; ++j) p(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return p;
}

}  // namespace detail

inline json to_json(const KrigingModel& m) {
  return {{"points", detail::point_rows(m.points())},
          {"values", m.values()},
          {"theta", m.theta()},
          {"beta", m.beta()},
          {"process_variance", m.process_variance()},
          {"nugget", m.nugget()}};
}

inline KrigingModel kriging_from_json(const json& j) {
  return KrigingModel(detail::point_rows_from_json(j.at("points")), j.at("values").get<std::vector<double>>(),
                      j.at("theta").get<std::vector<double>>(), j.at("nugget").get<double>());
}

inline json to_json(const PCESurrogate& s) {
  json idx = json::array();
  for (const auto& a : s.basis()) idx.push_back(a.degrees);
  return {{"space", to_json(s.space())}, {"indices", idx}, {"coefficients", s.coefficients()}};
}

inline PCESurrogate pce_from_json(const json& j) {
  std::vector<MultiIndex> basis;
  for (const auto& a : j.at("indices")) basis.push_back({a.get<std::vector<unsigned>>()});
  return PCESurrogate(input_space_from_json(j.at("space")), std::move(basis),
                      j.at("coefficients").get<std::vector<double>>());
}

inline json to_json(const UDRApprox& a) {
  json slices = json::array();
  for (const auto& sl : a.slices) {
    slices.push_back({{"dimension", sl.dimension},
                      {"nodes", sl.nodes},
                      {"node_values", sl.node_values},
                      {"node_derivatives", sl.node_derivatives},
                      {"newton_nodes", sl.interpolant.nodes()},
                      {"newton_coefficients", sl.interpolant.coefficients()}});
  }
  return {{"space", to_json(a.space)}, {"center_value", a.center_value}, {"slices", slices}};
}

inline UDRApprox udr_from_json(const json& j) {
  UDRApprox a;
  a.space = input_space_from_json(j.at("space"));
  a.center_value = j.at("center_value").get<double>();
  for (const auto& e : j.at("slices")) {
    UnivariateSlice sl;
    sl.dimension = e.at("dimension").get<std::size_t>();
    sl.nodes = e.at("nodes").get<std::vector<double>>();
    sl.node_values = e.at("node_values").get<std::vector<double>>();
    sl.node_derivatives = e.at("node_derivatives").get<std::vector<double>>();
    sl.interpolant = sl.node_derivatives.empty()
                         ? NewtonInterpolant::lagrange(sl.nodes, sl.node_values)
                         : NewtonInterpolant::hermite(sl.nodes, sl.node_values, sl.node_derivatives);
    a.slices.push_back(std::move(sl));
  }
  return a;
}

}  // namespace gustuq
