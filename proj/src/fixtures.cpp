#include "hetsize/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>

namespace hetsize {

namespace {

// 1-based literals to 0-based lists.
IndexList ones(std::initializer_list<Index> idx) {
  IndexList out;
  for (Index i : idx) out.push_back(i - 1);
  return out;
}

Matrix columns(Index n, std::initializer_list<std::initializer_list<double>> cols) {
  Matrix X(n, static_cast<Index>(cols.size()));
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (double x : c) X(i++, j) = x;
    ++j;
  }
  return X;
}

RowVector row(std::initializer_list<double> xs) {
  RowVector out(static_cast<Index>(xs.size()));
  Index j = 0;
  for (double x : xs) out(j++) = x;
  return out;
}

std::vector<Fixture> build() {
  std::vector<Fixture> out;

  {
    Fixture f;
    f.design = "A1";
    f.description = "n=4, k=2, R=(1,1); cond_het fails, cond_uncorr holds";
    f.X = columns(4, {{1, 1, 1, 1}, {1, -1, 1, -1}});
    f.R = row({1, 1});
    auto& e = f.expected;
    e.i_sharp = ones({2, 4});
    e.i1_m0lin = ones({1, 2, 3, 4});
    e.dim_b = 3;
    e.b_members = ones({2, 4});
    e.b_non_members = ones({1, 3});
    e.cond_het = false;
    e.het_witnesses = ones({2, 4});
    out.push_back(f);
  }

  for (int r3 : {0, 1}) {
    Fixture f;
    f.design = "A2";
    f.variant = "r3=" + std::to_string(r3);
    f.description = "A1 with a fifth observation carried by its own regressor";
    f.X = columns(5, {{1, 1, 1, 1, 0}, {1, -1, 1, -1, 0}, {0, 0, 0, 0, 2}});
    f.R = row({1, 1, static_cast<double>(r3)});
    auto& e = f.expected;
    e.in_span = ones({5});
    e.dim_b = 4;
    e.b_members = ones({2, 4, 5});
    e.b_non_members = ones({1, 3});
    e.cond_het = false;
    if (r3 == 0) {
      e.i_sharp = ones({2, 4, 5});
      e.i1_m0lin = ones({1, 2, 3, 4});
      e.het_witnesses = ones({2, 4});
    } else {
      e.i_sharp = ones({2, 4});
      e.i1_m0lin = ones({1, 2, 3, 4, 5});
      e.het_witnesses = ones({2, 4, 5});
      e.cond_uncorr = false;
      e.uncorr_witnesses = ones({5});
      e.controllable = Controllability::NotControllable;
    }
    out.push_back(f);
  }

  {
    Fixture f;
    f.design = "A3";
    f.description = "n=5, k=2, R=(1,0); observation 5 carries no regressor mass";
    f.X = columns(5, {{1, 1, 1, 1, 0}, {1, -1, 1, -1, 0}});
    f.R = row({1, 0});
    auto& e = f.expected;
    e.i_sharp = ones({5});
    e.i1_m0lin = ones({1, 2, 3, 4, 5});
    e.dim_b = 3;
    e.b_members = ones({5});
    e.b_non_members = ones({1, 2, 3, 4});
    e.cond_het = false;
    e.het_witnesses = ones({5});
    out.push_back(f);
  }

  for (int r3 : {0, 1}) {
    Fixture f;
    f.design = "A4";
    f.variant = "r3=" + std::to_string(r3);
    f.description = "A3 with a sixth observation carried by its own regressor";
    f.X = columns(6, {{1, 1, 1, 1, 0, 0}, {1, -1, 1, -1, 0, 0}, {0, 0, 0, 0, 0, 2}});
    f.R = row({1, 0, static_cast<double>(r3)});
    auto& e = f.expected;
    e.in_span = ones({6});
    e.dim_b = 4;
    e.b_members = ones({5, 6});
    e.b_non_members = ones({1, 2, 3, 4});
    e.cond_het = false;
    if (r3 == 0) {
      e.i_sharp = ones({5, 6});
      e.i1_m0lin = ones({1, 2, 3, 4, 5});
      e.het_witnesses = ones({5});
    } else {
      e.i_sharp = ones({5});
      e.i1_m0lin = ones({1, 2, 3, 4, 5, 6});
      e.het_witnesses = ones({5, 6});
      e.cond_uncorr = false;
      e.uncorr_witnesses = ones({6});
      e.controllable = Controllability::NotControllable;
    }
    out.push_back(f);
  }

  {
    Fixture f;
    f.design = "b-equals-span";
    f.description = "n=4, k=3, R=(1,1,0); B equals span(X)";
    f.X = columns(4, {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}});
    f.R = row({1, 1, 0});
    auto& e = f.expected;
    e.i_sharp = ones({2, 4});
    e.i1_m0lin = ones({1, 2, 3, 4});
    e.dim_b = 3;
    e.b_non_members = ones({1, 2, 3, 4});
    out.push_back(f);
  }

  {
    Fixture f;
    f.design = "two-group";
    f.description = "two group means, n1=n2=2, testing the first mean";
    f.X = columns(4, {{1, 1, 0, 0}, {0, 0, 1, 1}});
    f.R = row({1, 0});
    auto& e = f.expected;
    e.i_sharp = ones({3, 4});
    e.i1_m0lin = ones({1, 2, 3, 4});
    e.dim_b = 3;
    e.b_members = ones({3, 4});
    e.b_non_members = ones({1, 2});
    e.cond_het = false;
    e.het_witnesses = ones({3, 4});
    out.push_back(f);
  }

  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

HetModel Fixture::model() const {
  return partition.empty() ? HetModel::het(X.rows()) : HetModel::from_sizes(partition, X.rows());
}

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> corpus = build();
  return corpus;
}

std::vector<std::string> fixture_designs() {
  std::vector<std::string> names;
  for (const auto& f : fixtures())
    if (std::find(names.begin(), names.end(), f.design) == names.end()) names.push_back(f.design);
  return names;
}

const Fixture& find_fixture(const std::string& design, std::optional<int> r3) {
  const std::string want = lower(design);
  const Fixture* fallback = nullptr;
  for (const auto& f : fixtures()) {
    if (lower(f.design) != want) continue;
    if (f.variant.empty()) {
      if (r3) throw Error(ErrorCode::UnknownFixture, "fixture '" + f.design + "' has no r3 variant");
      return f;
    }
    const std::string tag = "r3=" + std::to_string(r3.value_or(1));
    if (f.variant == tag) return f;
    fallback = &f;
  }
  if (fallback)
    throw Error(ErrorCode::UnknownFixture, "fixture '" + fallback->design + "' supports r3 in {0, 1}");
  throw Error(ErrorCode::UnknownFixture, "no fixture named '" + design + "'");
}

}  // namespace hetsize
