#include "hetsize/conditions.hpp"

#include <string>

#include "hetsize/linalg.hpp"

namespace hetsize {

HetModel HetModel::het(Index n) { return from_sizes(std::vector<Index>(static_cast<std::size_t>(n), 1), n); }

HetModel HetModel::from_sizes(std::vector<Index> sizes, Index n) {
  if (sizes.empty()) throw Error(ErrorCode::BadPartition, "partition is empty");
  HetModel m;
  m.bounds_.push_back(0);
  for (Index s : sizes) {
    if (s < 1) throw Error(ErrorCode::BadPartition, "block sizes must be >= 1");
    m.bounds_.push_back(m.bounds_.back() + s);
  }
  if (m.bounds_.back() != n)
    throw Error(ErrorCode::BadPartition, "block sizes sum to " + std::to_string(m.bounds_.back()) +
                                             ", expected n = " + std::to_string(n));
  m.sizes_ = std::move(sizes);
  m.n_ = n;
  return m;
}

Vector HetModel::expand(const Vector& block_mass) const {
  Vector tau_sq(n_);
  for (Index j = 0; j < blocks(); ++j) {
    tau_sq.segment(begin(j), sizes_[j]).setConstant(block_mass(j) / static_cast<double>(sizes_[j]));
  }
  return tau_sq;
}

bool EquivalentForms::agree() const {
  return uncorr == sol0 && uncorr == sol && uncorr == simpl1 && uncorr == b_on_i1_lsharp &&
         uncorr == b_on_isharp_c;
}

void EquivalentForms::ensure() const {
  if (!agree()) throw Error(ErrorCode::EquivalenceBreach, "equivalent condition forms disagree");
}

const char* to_string(Controllability c) {
  switch (c) {
    case Controllability::Controllable: return "controllable";
    case Controllability::NotControllable: return "not_controllable";
    case Controllability::NotApplicable: return "not_applicable";
  }
  return "?";
}

bool check_assumption(const TestProblem& problem, const HatDiagnostics& hat) {
  const Index n = problem.n();
  const IndexList kept = linalg::complement(hat.in_span, n);
  const RowVector w = problem.restriction_times_inverse_gram();
  const RowVector full = w * problem.X().transpose();
  const double scale = full.cwiseAbs().maxCoeff();
  double surviving = 0.0;
  for (Index i : kept) surviving = std::max(surviving, std::abs(w.dot(problem.X().row(i))));
  return surviving > tol::zero * scale;
}

Verdict check_condition_uncorr(const SubspaceAnalysis& a) {
  Verdict out;
  for (Index i : a.sets.i1_m0lin) {
    if (1.0 - a.hat.h(i) <= tol::span) out.witnesses.push_back(i);
  }
  out.holds = out.witnesses.empty();
  return out;
}

Verdict check_condition_het(const SubspaceAnalysis& a) {
  Verdict out;
  for (Index i : a.sets.i1_m0lin) {
    if (a.b.contains_unit(i)) out.witnesses.push_back(i);
  }
  out.holds = out.witnesses.empty();
  return out;
}

EquivalentForms check_equivalent_forms(const SubspaceAnalysis& a) {
  const Index n = a.v.size();
  const IndexList involved = linalg::complement(a.sets.i_sharp, n);
  auto none_in = [](const IndexList& idx, auto&& member) {
    for (Index i : idx) {
      if (member(i)) return false;
    }
    return true;
  };
  auto in_span = [&](Index i) { return a.span_x.contains_unit(i); };
  auto in_b = [&](Index i) { return a.b.contains_unit(i); };
  auto unit_leverage = [&](Index i) { return !(a.hat.h(i) < 1.0 - tol::span); };

  EquivalentForms f;
  f.uncorr = none_in(a.sets.i1_m0lin, in_span);
  f.sol0 = none_in(involved, in_span);
  f.sol = none_in(involved, unit_leverage);
  f.simpl1 = none_in(a.sets.i1_lsharp, in_span);
  f.b_on_i1_lsharp = none_in(a.sets.i1_lsharp, in_b);
  f.b_on_isharp_c = none_in(involved, in_b);
  return f;
}

GroupConditions check_group_conditions(const SubspaceAnalysis& a, const HetModel& model) {
  if (model.n() != a.v.size())
    throw Error(ErrorCode::BadPartition, "partition covers " + std::to_string(model.n()) +
                                             " observations, problem has " + std::to_string(a.v.size()));
  const IndexList& i1_l = a.sets.i1_lsharp;
  const IndexList involved = linalg::complement(a.sets.i_sharp, a.v.size());

  GroupConditions out;
  for (Index j = 0; j < model.blocks(); ++j) {
    IndexList block;
    for (Index i = model.begin(j); i < model.end(j); ++i) block.push_back(i);
    const IndexList hit = linalg::intersect(block, i1_l);
    if (hit.empty()) continue;

    // span{e_i : i in block} is not inside B iff some e_i is not in B.
    out.het.qualifying_blocks.push_back(j);
    bool escapes_b = false;
    for (Index i : block) escapes_b = escapes_b || !a.b.contains_unit(i);
    if (!escapes_b) out.het.violating_blocks.push_back(j);

    if (!linalg::is_subset(hit, involved)) continue;
    out.uncorr.qualifying_blocks.push_back(j);
    bool escapes_span = false;
    for (Index i : hit) escapes_span = escapes_span || !a.span_x.contains_unit(i);
    if (!escapes_span) out.uncorr.violating_blocks.push_back(j);
  }
  out.het.holds = out.het.violating_blocks.empty();
  out.uncorr.holds = out.uncorr.violating_blocks.empty();
  return out;
}

ConditionReport decide_size_controllability(const TestProblem& problem, const SubspaceAnalysis& a,
                                            const HetModel& model) {
  ConditionReport rep;
  rep.model = model;
  rep.in_span = a.hat.in_span;
  rep.assumption_ok = check_assumption(problem, a.hat);
  rep.cond_uncorr = check_condition_uncorr(a);
  rep.cond_het = check_condition_het(a);
  rep.forms = check_equivalent_forms(a);
  rep.group = check_group_conditions(a, model);

  if (!rep.assumption_ok) {
    rep.size_controllable = Controllability::NotApplicable;
  } else {
    const bool ok = model.is_het() ? rep.cond_uncorr.holds : rep.group.het.holds;
    rep.size_controllable = ok ? Controllability::Controllable : Controllability::NotControllable;
  }
  return rep;
}

}  // namespace hetsize
