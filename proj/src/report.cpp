#include "hetsize/report.hpp"

namespace hetsize::report {

json indices(const IndexList& idx) {
  json out = json::array();
  for (Index i : idx) out.push_back(i + 1);
  return out;
}

IndexList indices_from(const json& j) {
  IndexList out;
  for (const auto& e : j) out.push_back(e.get<Index>() - 1);
  return out;
}

json vector(const Vector& x) {
  json out = json::array();
  for (Index i = 0; i < x.size(); ++i) out.push_back(x(i));
  return out;
}

Vector vector_from(const json& j) {
  Vector out(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& e : j) out(i++) = e.get<double>();
  return out;
}

json matrix(const Matrix& X) {
  json out = json::array();
  for (Index i = 0; i < X.rows(); ++i) out.push_back(vector(X.row(i).transpose()));
  return out;
}

json tolerances(const McConfig* mc, const CritvalConfig* cv) {
  json t = {{"span", tol::span}, {"zero", tol::zero}, {"member", tol::member}, {"omega", tol::omega}};
  if (mc) {
    t["concentration_eps"] = mc->concentration_eps;
    t["eps_alpha"] = mc->eps_alpha;
  }
  if (cv) {
    t["tol_c"] = cv->tol_c;
    t["overflow_guard"] = cv->overflow_guard;
  }
  return t;
}

json problem(const TestProblem& p) {
  return {{"n", p.n()},
          {"k", p.k()},
          {"R", vector(p.R().transpose())},
          {"r", p.r()}};
}

json model(const HetModel& m) {
  return {{"kind", m.is_het() ? "het" : "grouped"}, {"sizes", m.sizes()}};
}

HetModel model_from(const json& j) {
  const auto sizes = j.at("sizes").get<std::vector<Index>>();
  Index n = 0;
  for (Index s : sizes) n += s;
  return HetModel::from_sizes(sizes, n);
}

json analysis(const SubspaceAnalysis& a) {
  const auto& s = a.sets;
  return {{"v", vector(a.v)},
          {"leverage", vector(a.hat.h)},
          {"in_span", indices(a.hat.in_span)},
          {"I_sharp", indices(s.i_sharp)},
          {"I0_M0lin", indices(s.i0_m0lin)},
          {"I1_M0lin", indices(s.i1_m0lin)},
          {"I0_Lsharp", indices(s.i0_lsharp)},
          {"I1_Lsharp", indices(s.i1_lsharp)},
          {"dim_M0lin", a.m0lin.dim()},
          {"dim_B", a.b.dim()},
          {"B_unit_members", indices(a.b.unit_members())},
          {"dim_V_sharp", a.v_sharp.dim()},
          {"dim_L_sharp", a.l_sharp.dim()},
          {"decomposition",
           {{"dim_B", a.decomposition.dim_b},
            {"k", a.decomposition.k},
            {"dim_residual_part", a.decomposition.residual_part.dim()},
            {"max_cross", a.decomposition.max_cross},
            {"max_outside", a.decomposition.max_outside}}}};
}

namespace {

json verdict(const Verdict& v) { return {{"holds", v.holds}, {"witnesses", indices(v.witnesses)}}; }

json blocks_1based(const std::vector<Index>& b) {
  json out = json::array();
  for (Index j : b) out.push_back(j + 1);
  return out;
}

json group_verdict(const GroupVerdict& v) {
  return {{"holds", v.holds},
          {"violating_blocks", blocks_1based(v.violating_blocks)},
          {"qualifying_blocks", blocks_1based(v.qualifying_blocks)}};
}

json trace(const std::vector<RestartTrace>& t) {
  json out = json::array();
  for (const auto& r : t) out.push_back({{"start", r.start}, {"value", r.value}, {"evaluations", r.evaluations}});
  return out;
}

}  // namespace

json conditions(const ConditionReport& c) {
  const auto& f = c.forms;
  return {{"assumption_ok", c.assumption_ok},
          {"in_span", indices(c.in_span)},
          {"cond_uncorr", verdict(c.cond_uncorr)},
          {"cond_het", verdict(c.cond_het)},
          {"model", model(c.model)},
          {"group", {{"het", group_verdict(c.group.het)}, {"uncorr", group_verdict(c.group.uncorr)}}},
          {"equivalent_forms",
           {{"uncorr", f.uncorr},
            {"sol0", f.sol0},
            {"sol", f.sol},
            {"simpl1", f.simpl1},
            {"b_on_I1_Lsharp", f.b_on_i1_lsharp},
            {"b_on_I_sharp_complement", f.b_on_isharp_c},
            {"agree", f.agree()}}},
          {"size_controllable", to_string(c.size_controllable)}};
}

json cstar(const CStar& c) {
  return {{"value", c.value},
          {"argmax", c.argmax >= 0 ? json(c.argmax + 1) : json(nullptr)},
          {"searched", indices(c.searched)},
          {"values", c.values}};
}

json mc_config(const McConfig& mc) {
  return {{"n_samples", mc.n_samples},
          {"n_restarts", mc.n_restarts},
          {"seed", mc.seed},
          {"max_optimizer_iterations", mc.max_optimizer_iterations}};
}

json probability(const ProbabilityEstimate& p) {
  return {{"value", p.value}, {"std_error", p.std_error}, {"n_samples", p.n_samples}};
}

json size(const SizeEstimate& s) {
  return {{"value", s.value},
          {"std_error", s.std_error},
          {"critical_value", s.critical_value},
          {"block_mass", vector(s.block_mass)},
          {"tau_sq", vector(s.tau_sq)},
          {"n_samples", s.n_samples},
          {"n_restarts", s.n_restarts},
          {"trace", trace(s.trace)}};
}

SizeEstimate size_from(const json& j) {
  SizeEstimate s;
  s.value = j.at("value").get<double>();
  s.std_error = j.at("std_error").get<double>();
  s.critical_value = j.at("critical_value").get<double>();
  s.block_mass = vector_from(j.at("block_mass"));
  s.tau_sq = vector_from(j.at("tau_sq"));
  s.n_samples = j.at("n_samples").get<Index>();
  s.n_restarts = j.at("n_restarts").get<int>();
  for (const auto& t : j.at("trace"))
    s.trace.push_back({t.at("start").get<std::string>(), t.at("value").get<double>(), t.at("evaluations").get<int>()});
  return s;
}

json alpha_star(const AlphaStar& a) {
  return {{"value", a.value},
          {"std_error", a.std_error},
          {"c_star", a.c_star},
          {"c_evaluated", a.c_evaluated},
          {"eps_alpha", a.eps_alpha},
          {"estimate", size(a.estimate)}};
}

json critval(const CriticalValueResult& c) {
  return {{"c_diamond", c.c_diamond},
          {"alpha", c.alpha},
          {"c_star", c.c_star ? json(*c.c_star) : json(nullptr)},
          {"achieved_size", size(c.achieved_size)},
          {"bracket", {c.bracket_low, c.bracket_high}},
          {"iterations", c.iterations},
          {"model", model(c.model)}};
}

CriticalValueResult critval_from(const json& j) {
  CriticalValueResult c;
  c.c_diamond = j.at("c_diamond").get<double>();
  c.alpha = j.at("alpha").get<double>();
  if (!j.at("c_star").is_null()) c.c_star = j.at("c_star").get<double>();
  c.achieved_size = size_from(j.at("achieved_size"));
  c.bracket_low = j.at("bracket").at(0).get<double>();
  c.bracket_high = j.at("bracket").at(1).get<double>();
  c.iterations = j.at("iterations").get<int>();
  c.model = model_from(j.at("model"));
  return c;
}

json size_control(const SizeControlCheck& c) {
  return {{"controlled", c.controlled}, {"alpha", c.alpha}, {"seed", c.seed}, {"estimate", size(c.estimate)}};
}

json invariance(const InvarianceReport& r) {
  return {{"trials", r.trials},
          {"max_group_rel", r.max_group_rel},
          {"max_shift_rel", r.max_shift_rel},
          {"max_bmap_rel", r.max_bmap_rel},
          {"breaches", r.breaches},
          {"passed", r.passed()}};
}

json fixture(const Fixture& f) {
  const auto& e = f.expected;
  return {{"name", f.key()},
          {"design", f.design},
          {"variant", f.variant},
          {"description", f.description},
          {"X", matrix(f.X)},
          {"R", vector(f.R.transpose())},
          {"r", f.r},
          {"expected",
           {{"I_sharp", indices(e.i_sharp)},
            {"I1_M0lin", indices(e.i1_m0lin)},
            {"in_span", indices(e.in_span)},
            {"dim_B", e.dim_b},
            {"B_members", indices(e.b_members)},
            {"B_non_members", indices(e.b_non_members)},
            {"assumption_ok", e.assumption_ok},
            {"cond_uncorr", e.cond_uncorr},
            {"cond_het", e.cond_het},
            {"size_controllable", to_string(e.controllable)}}}};
}

json RunReport::to_json() const {
  json j = {{"schema_version", schema_version},
            {"tool_version", tool_version},
            {"command", command},
            {"inputs", inputs},
            {"tolerances", tolerances},
            {"results", results}};
  if (timings) j["timings"] = *timings;
  return j;
}

RunReport RunReport::from_json(const json& j) {
  if (j.at("schema_version").get<std::string>() != schema_version)
    throw Error(ErrorCode::ParseError, "unsupported report schema '" + j.at("schema_version").get<std::string>() + "'");
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  r.tolerances = j.at("tolerances");
  r.results = j.at("results");
  if (j.contains("timings")) r.timings = j.at("timings");
  return r;
}

}  // namespace hetsize::report
