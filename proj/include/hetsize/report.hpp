#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "hetsize/conditions.hpp"
#include "hetsize/critval.hpp"
#include "hetsize/fixtures.hpp"
#include "hetsize/size_oracle.hpp"
#include "hetsize/statistic.hpp"
#include "hetsize/subspaces.hpp"

namespace hetsize::report {

using json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "hetsize.report/1";
inline constexpr const char* tool_version = "0.1.0";

// Index lists are written 1-based.
json indices(const IndexList& idx);
IndexList indices_from(const json& j);
json vector(const Vector& x);
Vector vector_from(const json& j);
json matrix(const Matrix& X);

json tolerances(const McConfig* mc = nullptr, const CritvalConfig* cv = nullptr);
json problem(const TestProblem& p);
json model(const HetModel& m);
HetModel model_from(const json& j);
json analysis(const SubspaceAnalysis& a);
json conditions(const ConditionReport& c);
json cstar(const CStar& c);
json mc_config(const McConfig& mc);
json probability(const ProbabilityEstimate& p);
json size(const SizeEstimate& s);
SizeEstimate size_from(const json& j);
json alpha_star(const AlphaStar& a);
json critval(const CriticalValueResult& c);
CriticalValueResult critval_from(const json& j);
json size_control(const SizeControlCheck& c);
json invariance(const InvarianceReport& r);
json fixture(const Fixture& f);

/// Envelope written by every CLI subcommand.
struct RunReport {
  std::string command;
  json inputs = json::object();
  json tolerances = json::object();
  json results = json::object();
  std::optional<json> timings;  // only when requested; keeps reports reproducible

  json to_json() const;
  static RunReport from_json(const json& j);
};

}  // namespace hetsize::report
