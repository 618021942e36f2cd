#pragma once

#include <vector>

#include "hetsize/problem.hpp"
#include "hetsize/subspaces.hpp"

namespace hetsize {

/// Heteroskedasticity model C_(n_1,...,n_m): variances constant on
/// consecutive blocks. The all-ones partition is C_Het.
class HetModel {
 public:
  static HetModel het(Index n);
  /// Throws BadPartition unless every n_j >= 1 and sum n_j = n.
  static HetModel from_sizes(std::vector<Index> sizes, Index n);

  Index blocks() const { return static_cast<Index>(sizes_.size()); }
  Index n() const { return n_; }
  const std::vector<Index>& sizes() const { return sizes_; }
  /// Block j covers observations [begin(j), end(j)).
  Index begin(Index j) const { return bounds_[j]; }
  Index end(Index j) const { return bounds_[j + 1]; }
  bool is_het() const { return blocks() == n_; }

  /// Per-observation variances tau_i^2 = mass_j / n_j for a point of the
  /// m-dimensional simplex.
  Vector expand(const Vector& block_mass) const;

 private:
  std::vector<Index> sizes_;
  std::vector<Index> bounds_;
  Index n_ = 0;
};

struct Verdict {
  bool holds = true;
  IndexList witnesses;  // violating observations
};

struct GroupVerdict {
  bool holds = true;
  std::vector<Index> violating_blocks;   // 0-based block numbers
  std::vector<Index> qualifying_blocks;  // blocks the condition quantifies over
};

struct GroupConditions {
  GroupVerdict het;     // span{e_i : i in block} not inside B
  GroupVerdict uncorr;  // restricted blocks, span(X) version
};

/// The six formulations of the size-control condition, each evaluated on
/// its own code path.
struct EquivalentForms {
  bool uncorr = false;          // e_i not in span(X), i in I_1(M0lin)
  bool sol0 = false;            // e_i not in span(X) whenever v_i != 0
  bool sol = false;             // h_ii < 1 whenever v_i != 0
  bool simpl1 = false;          // e_i not in span(X), i in I_1(L#)
  bool b_on_i1_lsharp = false;  // e_i not in B, i in I_1(L#)
  bool b_on_isharp_c = false;   // e_i not in B, i outside I_#

  bool agree() const;
  /// Throws EquivalenceBreach when the forms disagree.
  void ensure() const;
};

enum class Controllability { Controllable, NotControllable, NotApplicable };
const char* to_string(Controllability c);

struct ConditionReport {
  bool assumption_ok = false;
  IndexList in_span;  // observations with h_i = 1
  Verdict cond_uncorr;
  Verdict cond_het;
  GroupConditions group;
  EquivalentForms forms;
  HetModel model;
  Controllability size_controllable = Controllability::NotApplicable;
};

bool check_assumption(const TestProblem& problem, const HatDiagnostics& hat);
Verdict check_condition_uncorr(const SubspaceAnalysis& a);
Verdict check_condition_het(const SubspaceAnalysis& a);
EquivalentForms check_equivalent_forms(const SubspaceAnalysis& a);
GroupConditions check_group_conditions(const SubspaceAnalysis& a, const HetModel& model);

/// Size controllability for the given model. Returns NotApplicable when the
/// regressor assumption fails instead of extrapolating.
ConditionReport decide_size_controllability(const TestProblem& problem, const SubspaceAnalysis& a,
                                            const HetModel& model);

}  // namespace hetsize
