#include "catch_amalgamated.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hetsize/fixtures.hpp"
#include "hetsize/io.hpp"
#include "hetsize/report.hpp"

using namespace hetsize;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("hetsize_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string message_of(auto&& fn, ErrorCode expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("no error thrown");
  return {};
}

}  // namespace

TEST_CASE("design files") {
  const std::string path = temp_file("a1.csv", "1,1\n1,-1\n1,1\n1,-1");
  const Matrix X = load_design(path);
  CHECK(X == find_fixture("A1").X);

  CHECK(parse_design("1, 2\r\n 3 ,4\r\n\r\n") == (Matrix(2, 2) << 1, 2, 3, 4).finished());
  CHECK(parse_design("+1e-3,-2.5E2\n").isApprox((Matrix(1, 2) << 1e-3, -250).finished()));

  message_of([] { parse_design(""); }, ErrorCode::ParseError);
  message_of([] { parse_design("\n \n"); }, ErrorCode::ParseError);
  const std::string m = message_of([] { parse_design("1,a\n2,3"); }, ErrorCode::ParseError);
  CHECK(m.find("row 1, column 2") != std::string::npos);
  const std::string blank = message_of([] { parse_design("1,2\n3,\n"); }, ErrorCode::ParseError);
  CHECK(blank.find("row 2, column 2") != std::string::npos);
  const std::string rag = message_of([] { parse_design("1,2\n3\n"); }, ErrorCode::RaggedRows);
  CHECK(rag.find("row 2") != std::string::npos);
  message_of([] { load_design("/nonexistent/hetsize.csv"); }, ErrorCode::ParseError);
}

TEST_CASE("number lists, partitions and weight schemes") {
  CHECK(parse_number_list("1, -1,0.5") == (RowVector(3) << 1, -1, 0.5).finished());
  message_of([] { parse_number_list("1,,2"); }, ErrorCode::ParseError);
  message_of([] { parse_number_list(""); }, ErrorCode::ParseError);
  CHECK(parse_partition("2,2,1") == std::vector<Index>{2, 2, 1});
  message_of([] { parse_partition("2,1.5"); }, ErrorCode::ParseError);

  CHECK(parse_weight_scheme("hc0").kind == WeightScheme::Kind::HC0);
  CHECK(parse_weight_scheme("HC3").kind == WeightScheme::Kind::HC3);
  CHECK(parse_weight_scheme("hc4").kind == WeightScheme::Kind::HC4);
  message_of([] { parse_weight_scheme("hc5"); }, ErrorCode::ParseError);
  const std::string w = temp_file("w.txt", "1\n2\n3\n4\n");
  const WeightScheme c = parse_weight_scheme("custom:" + w);
  REQUIRE(c.custom_d);
  CHECK(*c.custom_d == (Vector(4) << 1, 2, 3, 4).finished());
}

TEST_CASE("fixture corpus") {
  CHECK(fixture_designs() == std::vector<std::string>{"A1", "A2", "A3", "A4", "b-equals-span", "two-group"});
  CHECK(fixtures().size() == 8);
  CHECK(find_fixture("a2").variant == "r3=1");
  CHECK(find_fixture("A2", 0).variant == "r3=0");
  CHECK(find_fixture("A1").expected.i_sharp == IndexList{1, 3});
  CHECK(find_fixture("A3").expected.dim_b == 3);
  CHECK(find_fixture("two-group").expected.controllable == Controllability::Controllable);
  message_of([] { find_fixture("A9"); }, ErrorCode::UnknownFixture);
  message_of([] { find_fixture("A1", 0); }, ErrorCode::UnknownFixture);
  message_of([] { find_fixture("A2", 3); }, ErrorCode::UnknownFixture);
}

TEST_CASE("report serialization round-trips") {
  SizeEstimate s;
  s.value = 0.123456789012345678;
  s.std_error = 1.0 / 3.0;
  s.critical_value = 355.61914062500006;
  s.block_mass = (Vector(3) << 0.1, 0.2, 0.7000000000000001).finished();
  s.tau_sq = (Vector(3) << 1e-300, 2.5e-17, 0.7).finished();
  s.n_samples = 200000;
  s.n_restarts = 4;
  s.trace = {{"barycenter", 0.1, 17}, {"vertex:1", 0.25, 40}};

  const report::json j = report::size(s);
  const SizeEstimate back = report::size_from(report::json::parse(j.dump()));
  CHECK(back.value == s.value);
  CHECK(back.std_error == s.std_error);
  CHECK(back.critical_value == s.critical_value);
  CHECK(back.block_mass == s.block_mass);
  CHECK(back.tau_sq == s.tau_sq);
  CHECK(back.trace.size() == 2);
  CHECK(back.trace[1].start == "vertex:1");
  CHECK(report::size(back).dump() == j.dump());

  CriticalValueResult c;
  c.c_diamond = 3.5;
  c.alpha = 0.05;
  c.c_star = 2.0;
  c.achieved_size = s;
  c.bracket_low = 3.4;
  c.bracket_high = 3.5;
  c.iterations = 12;
  c.model = HetModel::from_sizes({2, 1}, 3);
  const CriticalValueResult cb = report::critval_from(report::json::parse(report::critval(c).dump()));
  CHECK(report::critval(cb).dump() == report::critval(c).dump());
  CHECK(cb.model.sizes() == c.model.sizes());

  c.c_star.reset();
  CHECK_FALSE(report::critval_from(report::critval(c)).c_star);

  report::RunReport r;
  r.command = "size";
  r.inputs = {{"seed", 42}, {"fixture", "A1"}};
  r.tolerances = report::tolerances();
  r.results = {{"size", j}};
  const std::string text = r.to_json().dump(2);
  const report::RunReport rb = report::RunReport::from_json(report::json::parse(text));
  CHECK(rb.to_json().dump(2) == text);
  CHECK_FALSE(rb.timings);
  CHECK(r.to_json()["schema_version"] == report::schema_version);

  auto bad = r.to_json();
  bad["schema_version"] = "other/9";
  message_of([&] { report::RunReport::from_json(bad); }, ErrorCode::ParseError);
}

TEST_CASE("reports carry every tolerance and 1-based indices") {
  McConfig mc;
  CritvalConfig cv;
  const report::json t = report::tolerances(&mc, &cv);
  for (const char* key : {"span", "zero", "member", "omega", "concentration_eps", "eps_alpha", "tol_c", "overflow_guard"})
    CHECK(t.contains(key));
  CHECK(report::indices({0, 3}).dump() == "[1,4]");
  CHECK(report::indices_from(report::indices({0, 3})) == IndexList{0, 3});
}
