#include "hetsize/cli.hpp"

#include <chrono>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "hetsize/conditions.hpp"
#include "hetsize/critval.hpp"
#include "hetsize/fixtures.hpp"
#include "hetsize/io.hpp"
#include "hetsize/linalg.hpp"
#include "hetsize/random_problem.hpp"
#include "hetsize/report.hpp"
#include "hetsize/size_oracle.hpp"
#include "hetsize/statistic.hpp"
#include "hetsize/subspaces.hpp"

namespace hetsize {

namespace {

using report::json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemArgs {
  std::string design;
  std::string fixture;
  int r3 = 1;
  std::string restriction;
  double r = 0.0;
  std::string weights = "hc0";
  std::string partition;
};

struct McArgs {
  Index samples = 100000;
  int restarts = 4;
  std::uint64_t seed = 42;
  int max_iter = 150;
};

struct OutputArgs {
  bool pretty = false;
  bool timings = false;
};

struct Setup {
  std::optional<TestProblem> problem;
  WeightScheme weights;
  std::optional<HetModel> model;
  json inputs = json::object();
};

void add_problem_options(CLI::App* sub, ProblemArgs& a) {
  sub->add_option("--design", a.design, "CSV design matrix (no header)");
  sub->add_option("--fixture", a.fixture, "built-in design name (see `fixtures --list`)");
  sub->add_option("--r3", a.r3, "variant of A2/A4 fixtures")->check(CLI::IsMember({0, 1}));
  sub->add_option("--restriction", a.restriction, "restriction row R, comma separated");
  sub->add_option("--r", a.r, "right-hand side r");
  sub->add_option("--weights", a.weights, "hc0|hc1|hc2|hc3|hc4|custom:<path>");
  sub->add_option("--partition", a.partition, "block sizes n_1,...,n_m (default: all ones)");
}

void add_mc_options(CLI::App* sub, McArgs& m) {
  sub->add_option("--samples", m.samples, "Monte Carlo draws");
  sub->add_option("--restarts", m.restarts, "random optimizer restarts");
  sub->add_option("--seed", m.seed, "RNG seed");
  sub->add_option("--max-iter", m.max_iter, "optimizer iterations per start");
}

void add_output_options(CLI::App* sub, OutputArgs& o) {
  sub->add_flag("--pretty", o.pretty, "human readable summary instead of JSON");
  sub->add_flag("--timings", o.timings, "include wall-clock timings in the report");
}

McConfig mc_from(const McArgs& m) {
  McConfig mc;
  mc.n_samples = m.samples;
  mc.n_restarts = m.restarts;
  mc.seed = m.seed;
  mc.max_optimizer_iterations = m.max_iter;
  mc.validate();
  return mc;
}

Setup resolve(const ProblemArgs& a, const CLI::App* sub) {
  const bool has_design = sub->count("--design") > 0;
  const bool has_fixture = sub->count("--fixture") > 0;
  if (has_design == has_fixture) throw UsageError("give exactly one of --design or --fixture");

  Setup s;
  json& in = s.inputs;
  std::vector<Index> default_partition;
  if (has_fixture) {
    if (sub->count("--restriction") || sub->count("--r"))
      throw UsageError("--restriction and --r come from the fixture");
    const std::optional<int> r3 = sub->count("--r3") ? std::optional<int>(a.r3) : std::nullopt;
    const Fixture& f = find_fixture(a.fixture, r3);
    s.problem = f.problem();
    default_partition = f.partition;
    in["fixture"] = f.key();
  } else {
    if (!sub->count("--restriction")) throw UsageError("--design needs --restriction");
    if (sub->count("--r3")) throw UsageError("--r3 applies to fixtures only");
    s.problem = validate_problem(load_design(a.design), parse_number_list(a.restriction), a.r);
    in["design"] = a.design;
  }
  in["restriction"] = report::vector(s.problem->R().transpose());
  in["r"] = s.problem->r();

  s.weights = parse_weight_scheme(a.weights);
  in["weights"] = a.weights;

  const std::vector<Index> sizes = a.partition.empty() ? default_partition : parse_partition(a.partition);
  s.model = sizes.empty() ? HetModel::het(s.problem->n()) : HetModel::from_sizes(sizes, s.problem->n());
  in["partition"] = s.model->sizes();
  return s;
}

void add_mc_inputs(json& in, const McConfig& mc) {
  in["samples"] = mc.n_samples;
  in["restarts"] = mc.n_restarts;
  in["seed"] = mc.seed;
  in["max_iter"] = mc.max_optimizer_iterations;
}

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotControllable:
      return exit_code::not_controllable;
    case ErrorCode::AssumptionViolated:
      return exit_code::assumption_violated;
    case ErrorCode::DecompositionFailure:
    case ErrorCode::EquivalenceBreach:
    case ErrorCode::InvarianceBreach:
    case ErrorCode::BracketFailure:
      return exit_code::internal;
    default:
      return exit_code::data;
  }
}

std::string list(const IndexList& idx) {
  std::ostringstream os;
  os << '{';
  for (std::size_t t = 0; t < idx.size(); ++t) os << (t ? "," : "") << idx[t] + 1;
  os << '}';
  return os.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---- subcommands ----------------------------------------------------------

int cmd_check(const Setup& s, report::RunReport& rep, std::ostream& pretty) {
  const TestProblem& p = *s.problem;
  const SubspaceAnalysis a = analyze(p);
  const ConditionReport c = decide_size_controllability(p, a, *s.model);
  rep.results = {{"problem", report::problem(p)}, {"analysis", report::analysis(a)}, {"conditions", report::conditions(c)}};

  pretty << "n = " << p.n() << ", k = " << p.k() << "\n"
         << "I_#          " << list(a.sets.i_sharp) << "\n"
         << "I1(M0lin)    " << list(a.sets.i1_m0lin) << "\n"
         << "I1(L#)       " << list(a.sets.i1_lsharp) << "\n"
         << "h_i = 1      " << list(a.hat.in_span) << "\n"
         << "dim B        " << a.b.dim() << "  (e_i in B: " << list(a.b.unit_members()) << ")\n"
         << "dim L#       " << a.l_sharp.dim() << "\n"
         << "assumption   " << yes_no(c.assumption_ok) << "\n"
         << "cond_uncorr  " << yes_no(c.cond_uncorr.holds) << "  witnesses " << list(c.cond_uncorr.witnesses) << "\n"
         << "cond_het     " << yes_no(c.cond_het.holds) << "  witnesses " << list(c.cond_het.witnesses) << "\n"
         << "size control " << to_string(c.size_controllable) << "\n";

  switch (c.size_controllable) {
    case Controllability::Controllable:
      return exit_code::ok;
    case Controllability::NotControllable:
      return exit_code::not_controllable;
    default:
      return exit_code::assumption_violated;
  }
}

int cmd_cstar(const Setup& s, bool with_alpha, const McArgs& m, report::RunReport& rep, std::ostream& pretty) {
  const StatContext ctx(*s.problem, s.weights);
  const CStar cs = c_star(ctx);
  rep.results["c_star"] = report::cstar(cs);
  pretty << "C*       " << std::setprecision(12) << cs.value;
  if (cs.argmax >= 0) pretty << "  at i = " << cs.argmax + 1;
  pretty << "\n";

  try {
    const CStar red = c_star_reduced(ctx);
    rep.results["c_star_reduced"] = report::cstar(red);
    pretty << "reduced  " << red.value << "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PreconditionUnverified) throw;
    rep.results["c_star_reduced"] = nullptr;
    pretty << "reduced  unavailable (condition fails)\n";
  }

  if (with_alpha) {
    const McConfig mc = mc_from(m);
    add_mc_inputs(rep.inputs, mc);
    rep.tolerances = report::tolerances(&mc);
    const ConditionReport c = decide_size_controllability(ctx.problem(), ctx.analysis(), HetModel::het(ctx.problem().n()));
    if (c.size_controllable == Controllability::Controllable) {
      const AlphaStar as = alpha_star(ctx, mc);
      rep.results["alpha_star"] = report::alpha_star(as);
      pretty << "alpha*   " << as.value << " (se " << as.std_error << ")\n";
    } else {
      rep.results["alpha_star"] = nullptr;
      pretty << "alpha*   undefined (" << to_string(c.size_controllable) << ")\n";
    }
  }
  return exit_code::ok;
}

int cmd_size(const Setup& s, double crit, const std::string& tau, const McArgs& m, report::RunReport& rep,
             std::ostream& pretty) {
  const McConfig mc = mc_from(m);
  add_mc_inputs(rep.inputs, mc);
  rep.inputs["crit"] = crit;
  rep.tolerances = report::tolerances(&mc);
  const StatContext ctx(*s.problem, s.weights);
  const SizeOracle oracle(ctx, *s.model, mc);
  if (!tau.empty()) {
    const Vector mass = parse_number_list(tau).transpose();
    rep.inputs["block_mass"] = report::vector(mass);
    const ProbabilityEstimate pe = oracle.rejection_probability(mass, crit);
    rep.results["rejection_probability"] = report::probability(pe);
    pretty << "P(T >= " << crit << ") = " << pe.value << " (se " << pe.std_error << ")\n";
    return exit_code::ok;
  }
  const SizeEstimate se = oracle.worst_case_size(crit);
  rep.results["size"] = report::size(se);
  pretty << "worst-case size at C = " << crit << ": " << se.value << " (se " << se.std_error << ")\n"
         << "argmax block mass: " << report::vector(se.block_mass).dump() << "\n";
  return exit_code::ok;
}

int cmd_critval(const Setup& s, double alpha, double tol_c, bool verify, const McArgs& m, report::RunReport& rep,
                std::ostream& pretty) {
  const McConfig mc = mc_from(m);
  CritvalConfig cfg;
  cfg.tol_c = tol_c;
  add_mc_inputs(rep.inputs, mc);
  rep.inputs["alpha"] = alpha;
  rep.tolerances = report::tolerances(&mc, &cfg);
  const StatContext ctx(*s.problem, s.weights);
  const CriticalValueResult cv = smallest_critical_value(ctx, *s.model, alpha, mc, cfg);
  rep.results["critval"] = report::critval(cv);
  pretty << "c_diamond(" << alpha << ") = " << std::setprecision(10) << cv.c_diamond << "\n";
  if (cv.c_star) pretty << "C*           = " << *cv.c_star << "\n";
  pretty << "size at c_diamond: " << cv.achieved_size.value << " (se " << cv.achieved_size.std_error << ")\n";
  if (verify) {
    const SizeControlCheck chk = verify_size_control(ctx, *s.model, cv.c_diamond, alpha, mc);
    rep.results["verification"] = report::size_control(chk);
    pretty << "independent check: " << (chk.controlled ? "controlled" : "NOT controlled") << " (size "
           << chk.estimate.value << ")\n";
  }
  return exit_code::ok;
}

json audit_problem(const TestProblem& p, const WeightScheme& w, int trials, int partitions, std::uint64_t seed,
                   bool& ok) {
  json out = {{"problem", report::problem(p)}};
  std::vector<std::string> failures;
  try {
    const SubspaceAnalysis a = analyze(p);
    out["decomposition"] = {{"dim_B", a.decomposition.dim_b},
                            {"k", a.decomposition.k},
                            {"dim_residual_part", a.decomposition.residual_part.dim()}};

    const EquivalentForms forms = check_equivalent_forms(a);
    out["forms_agree"] = forms.agree();
    if (!forms.agree()) failures.push_back("equivalent forms disagree");

    const Verdict uncorr = check_condition_uncorr(a);
    const GroupConditions ones = check_group_conditions(a, HetModel::het(p.n()));
    if (ones.het.holds != uncorr.holds || ones.uncorr.holds != uncorr.holds)
      failures.push_back("all-ones partition does not reduce to the single-index condition");

    std::mt19937_64 rng(seed);
    int group_checked = 0;
    for (int t = 0; t < partitions; ++t) {
      const HetModel m = random_partition(rng, p.n());
      const GroupConditions g = check_group_conditions(a, m);
      ++group_checked;
      if (g.het.holds != g.uncorr.holds) failures.push_back("group conditions disagree on a random partition");
    }
    out["partitions_checked"] = group_checked;

    const auto& s = a.sets;
    if (!linalg::is_subset(s.i0_m0lin, s.i0_lsharp) || !linalg::is_subset(s.i0_lsharp, s.i_sharp))
      failures.push_back("inclusion chain I0(M0lin) <= I0(L#) <= I_# broken");

    if (check_assumption(p, a.hat)) {
      if (a.l_sharp.dim() > p.n() - 2) failures.push_back("dim L# exceeds n - 2");
      const StatContext ctx(p, w);
      std::normal_distribution<double> normal;
      Vector y(p.n());
      for (Index i = 0; i < y.size(); ++i) y(i) = normal(rng);
      const InvarianceReport inv = invariance_audit(ctx, y, trials, seed ^ 0x9e3779b97f4a7c15ULL);
      out["invariance"] = report::invariance(inv);
      for (const auto& b : inv.breaches) failures.push_back(b);
    } else {
      out["invariance"] = nullptr;
    }
  } catch (const Error& e) {
    failures.push_back(e.what());
  }
  out["failures"] = failures;
  out["passed"] = failures.empty();
  ok = ok && failures.empty();
  return out;
}

std::string render(const report::RunReport& rep) { return rep.to_json().dump(2) + "\n"; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Worst-case size and size-controlling critical values for heteroskedasticity-robust tests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::tool_version);

  ProblemArgs pa;
  McArgs ma;
  OutputArgs oa;

  auto* check = app.add_subcommand("check", "index sets, subspaces and size-control conditions");
  add_problem_options(check, pa);
  add_output_options(check, oa);

  bool with_alpha = false;
  auto* cstar = app.add_subcommand("cstar", "lower bound C* (and optionally alpha*)");
  add_problem_options(cstar, pa);
  add_mc_options(cstar, ma);
  add_output_options(cstar, oa);
  cstar->add_flag("--alpha-star", with_alpha, "estimate alpha* by Monte Carlo");

  double crit = 0.0;
  std::string tau;
  auto* size = app.add_subcommand("size", "worst-case null rejection probability at a critical value");
  add_problem_options(size, pa);
  add_mc_options(size, ma);
  add_output_options(size, oa);
  size->add_option("--crit", crit, "critical value C")->required();
  size->add_option("--tau", tau, "evaluate at this block mass instead of maximizing");

  double alpha = 0.05;
  double tol_c = CritvalConfig{}.tol_c;
  bool verify = false;
  auto* critval = app.add_subcommand("critval", "smallest size-controlling critical value");
  add_problem_options(critval, pa);
  add_mc_options(critval, ma);
  add_output_options(critval, oa);
  critval->add_option("--alpha", alpha, "nominal level");
  critval->add_option("--tol-c", tol_c, "relative bracket width");
  critval->add_flag("--verify", verify, "re-check size control with an independent seed");

  bool list_fixtures = false;
  std::string show;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "built-in designs");
  fixtures_cmd->add_flag("--list", list_fixtures, "list design names");
  fixtures_cmd->add_option("--show", show, "print one fixture with its expected diagnostics");
  fixtures_cmd->add_option("--r3", pa.r3, "variant of A2/A4")->check(CLI::IsMember({0, 1}));
  fixtures_cmd->add_flag("--pretty", oa.pretty, "human readable output");

  std::uint64_t random_seed = 0;
  int n_problems = 1;
  int trials = 20;
  int partitions = 10;
  auto* audit = app.add_subcommand("audit", "invariance and equivalence property checks");
  add_problem_options(audit, pa);
  add_output_options(audit, oa);
  audit->add_option("--random-seed", random_seed, "audit random problems drawn from this seed");
  audit->add_option("--problems", n_problems, "number of random problems")->check(CLI::PositiveNumber);
  audit->add_option("--trials", trials, "transforms per invariance check")->check(CLI::PositiveNumber);
  audit->add_option("--partitions", partitions, "random partitions per problem")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return exit_code::ok;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  report::RunReport rep;
  rep.command = sub->get_name();
  rep.tolerances = report::tolerances();
  std::ostringstream pretty;
  const auto start = Clock::now();
  int code = exit_code::ok;

  try {
    if (sub == fixtures_cmd) {
      if (list_fixtures == !show.empty()) throw UsageError("give exactly one of --list or --show");
      if (list_fixtures) {
        rep.results["designs"] = fixture_designs();
        json all = json::array();
        for (const auto& f : fixtures()) all.push_back(f.key());
        rep.results["fixtures"] = all;
        for (const auto& name : fixture_designs()) pretty << name << "\n";
      } else {
        const std::optional<int> r3 = fixtures_cmd->count("--r3") ? std::optional<int>(pa.r3) : std::nullopt;
        const Fixture& f = find_fixture(show, r3);
        rep.inputs["fixture"] = f.key();
        rep.results["fixture"] = report::fixture(f);
        pretty << f.key() << ": " << f.description << "\n" << report::fixture(f)["expected"].dump(2) << "\n";
      }
    } else if (sub == audit) {
      std::vector<std::pair<std::string, TestProblem>> problems;
      WeightScheme w = parse_weight_scheme(pa.weights);
      if (audit->count("--random-seed")) {
        if (audit->count("--design") || audit->count("--fixture"))
          throw UsageError("--random-seed excludes --design and --fixture");
        std::mt19937_64 rng(random_seed);
        for (int t = 0; t < n_problems; ++t) problems.emplace_back("random:" + std::to_string(t), random_problem(rng));
        rep.inputs["random_seed"] = random_seed;
        rep.inputs["problems"] = n_problems;
        rep.inputs["weights"] = pa.weights;
      } else {
        Setup s = resolve(pa, audit);
        w = s.weights;
        rep.inputs = s.inputs;
        problems.emplace_back(s.inputs.contains("fixture") ? s.inputs["fixture"].get<std::string>() : pa.design,
                              *s.problem);
      }
      rep.inputs["trials"] = trials;
      rep.inputs["partitions"] = partitions;
      bool ok = true;
      json runs = json::array();
      std::uint64_t sub_seed = random_seed;
      for (const auto& [name, p] : problems) {
        json r = audit_problem(p, w, trials, partitions, sub_seed++, ok);
        r["name"] = name;
        pretty << name << ": " << (r["passed"].get<bool>() ? "pass" : "FAIL") << "\n";
        for (const auto& f : r["failures"]) pretty << "  " << f.get<std::string>() << "\n";
        runs.push_back(std::move(r));
      }
      rep.results["audits"] = runs;
      rep.results["passed"] = ok;
      code = ok ? exit_code::ok : exit_code::internal;
    } else {
      const Setup s = resolve(pa, sub);
      rep.inputs = s.inputs;
      if (sub == check) code = cmd_check(s, rep, pretty);
      else if (sub == cstar) code = cmd_cstar(s, with_alpha, ma, rep, pretty);
      else if (sub == size) code = cmd_size(s, crit, tau, ma, rep, pretty);
      else code = cmd_critval(s, alpha, tol_c, verify, ma, rep, pretty);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << sub->help();
    return exit_code::usage;
  } catch (const Error& e) {
    code = exit_for(e.code());
    rep.results = {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    err << "hetsize " << rep.command << ": " << e.what() << "\n";
    pretty.str("");
    pretty << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "hetsize " << rep.command << ": internal error: " << e.what() << "\n";
    return exit_code::internal;
  }

  if (oa.timings) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    rep.timings = json{{"wall_seconds", secs}};
  }
  if (oa.pretty) out << pretty.str();
  else out << render(rep);
  return code;
}

}  // namespace hetsize
