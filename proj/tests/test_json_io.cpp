#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "vikit/harness.hpp"
#include "vikit/json_io.hpp"

using namespace vikit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool rows_equal_ignoring_time(const IterationRecord& a, const IterationRecord& b) {
  return a.n == b.n && a.x_norm == b.x_norm && a.residual_norm == b.residual_norm &&
         a.eta == b.eta && a.inner_f_evals == b.inner_f_evals && a.gap == b.gap;
}

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() /
         ("vikit_io_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("matrices and vectors round-trip exactly") {
  const DenseMatrix m(2, 3, {1.5, -2.25, 0.1, 3.0, 1e-17, 7.0});
  CHECK(matrix_from_json(matrix_to_json(m), "t") == m);
  // Through text as well: the writer emits shortest round-trip decimals.
  const json reparsed = json::parse(matrix_to_json(m).dump());
  CHECK(matrix_from_json(reparsed, "t") == m);

  CHECK_THROWS_AS((void)matrix_from_json(json::array(), "t"), IoError);
  CHECK_THROWS_AS((void)matrix_from_json(json::parse("[[1,2],[3]]"), "t"), IoError);
  CHECK_THROWS_AS((void)matrix_from_json(json::parse("[[1,\"x\"]]"), "t"), IoError);
  CHECK(vector_from_json(json::parse("[1.0,2.5]"), "t") == Vector{1.0, 2.5});
  CHECK_THROWS_AS((void)vector_from_json(json::parse("{}"), "t"), IoError);
  const json with_nan = std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS((void)vector_from_json(with_nan, "t"), IoError);
}

TEST_CASE("every set kind survives serialization") {
  const std::vector<FeasibleSet> sets{
      FeasibleSet{WholeSpace{3}},
      FeasibleSet{HalfSpace(Vector{1.0, -2.0}, 0.5)},
      FeasibleSet{AffineSet(DenseMatrix(1, 3, {1, 2, -1}), Vector{0.25})},
      FeasibleSet{Box(Vector{-1.0, -kInf}, Vector{kInf, 2.0})},
      FeasibleSet{Polyhedron(DenseMatrix(2, 2, {1, 0, 0, 1}), Vector{1.0, 1.0})},
  };
  for (const FeasibleSet& c : sets) {
    const json j = set_to_json(c);
    const FeasibleSet back = set_from_json(json::parse(j.dump()));
    CHECK(set_to_json(back) == j);
    CHECK(dim_of(back) == dim_of(c));
    // Same projection behavior on a fixed probe point.
    const Vector probe{0.3, -4.0, 2.0};
    const Vector probe_cut(probe.begin(), probe.begin() + dim_of(c));
    CHECK(project(back, probe_cut).point == project(c, probe_cut).point);
  }
  // Unbounded box sides are stored as nulls.
  const json bj = set_to_json(sets[3]);
  CHECK(bj.at("lo")[1].is_null());
  CHECK(bj.at("hi")[0].is_null());
}

TEST_CASE("set parsing is strict") {
  json j = set_to_json(FeasibleSet{WholeSpace{2}});
  j["extra"] = true;
  CHECK_THROWS_AS((void)set_from_json(j), IoError);
  CHECK_THROWS_AS((void)set_from_json(json::parse(R"({"type":"moebius"})")), IoError);
  CHECK_THROWS_AS((void)set_from_json(json::parse(R"({"type":"whole_space","dim":0})")),
                  IoError);
  CHECK_THROWS_AS((void)set_from_json(json::parse(R"({"type":"whole_space","dim":2.5})")),
                  IoError);
  // Zero normal is rejected at reconstruction.
  CHECK_THROWS_AS((void)set_from_json(json::parse(R"({"type":"half_space","a":[0,0],"c":1})")),
                  IoError);
}

TEST_CASE("operators survive serialization including nesting") {
  const VIOperator aff(AffineOperator{DenseMatrix(2, 2, {0, -1, 1, 0}), Vector{0.5, -0.5}},
                       Monotonicity::monotone);
  const json ja = operator_to_json(aff);
  CHECK(ja.at("type") == "affine");
  CHECK(operator_to_json(operator_from_json(json::parse(ja.dump()))) == ja);

  const VIOperator anti{AntidiagonalOperator{6}};
  const json jd = operator_to_json(anti);
  CHECK(jd.at("type") == "antidiagonal");
  CHECK(jd.at("dim") == 6);
  const VIOperator anti_back = operator_from_json(jd);
  CHECK(anti_back.dim() == 6);
  CHECK(anti_back.eval(Vector{1, 2, 3, 4, 5, 6}) == anti.eval(Vector{1, 2, 3, 4, 5, 6}));

  const VIOperator sc = VIOperator::scaled_of(aff);
  const json js = operator_to_json(sc);
  CHECK(js.at("type") == "scaled");
  CHECK(js.at("inner").at("type") == "affine");
  const VIOperator sc_back = operator_from_json(js);
  CHECK(sc_back.monotonicity() == Monotonicity::pseudo_monotone);
  CHECK(sc_back.eval(Vector{0.3, 0.7}) == sc.eval(Vector{0.3, 0.7}));

  json bad = operator_to_json(aff);
  bad["spin"] = 1;
  CHECK_THROWS_AS((void)operator_from_json(bad), IoError);
  CHECK_THROWS_AS((void)operator_from_json(json::parse(R"({"type":"fourier"})")), IoError);
}

TEST_CASE("generated problems reload bit-identically") {
  const VIProblem p = make_hp_instance(4, 3, 7);
  const fs::path path = tmp_file("hp.json");
  save_problem(path.string(), p);
  const VIProblem back = load_problem(path.string());
  fs::remove(path);

  CHECK(problem_to_json(back) == problem_to_json(p));
  CHECK(back.generator == "hp");
  CHECK(back.seed == 7);
  CHECK(back.m == 4);
  CHECK(back.k == 3);

  // Rerunning the solver on the reloaded instance reproduces the history.
  const SolverConfig cfg = default_config_for(Algorithm::alg1);
  const RunReport ra = solve(p, cfg);
  const RunReport rb = solve(back, cfg);
  REQUIRE(ra.history.size() == rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    CHECK(rows_equal_ignoring_time(ra.history[i], rb.history[i]));
  }
  CHECK(ra.final_x == rb.final_x);
}

TEST_CASE("rotation problems stay structural on disk") {
  const VIProblem p = make_antidiagonal(500);
  const json j = problem_to_json(p);
  // The operator is stored by dimension, not as a dense 500x500 matrix.
  CHECK(j.at("operator").at("type") == "antidiagonal");
  CHECK(j.at("operator").at("dim") == 500);
  const VIProblem back = problem_from_json(j);
  CHECK(back.op.dim() == 500);
  CHECK(problem_to_json(back) == j);
}

TEST_CASE("problem parsing is strict about schema and solutions") {
  const json good = problem_to_json(make_hp_instance(4, 3, 7));
  json bad = good;
  bad["schema"] = 2;
  CHECK_THROWS_AS((void)problem_from_json(bad), IoError);
  bad = good;
  bad["note"] = "hi";
  CHECK_THROWS_AS((void)problem_from_json(bad), IoError);
  bad = good;
  bad["seed"] = -1;
  CHECK_THROWS_AS((void)problem_from_json(bad), IoError);
  bad = good;
  bad["known_solution"] = Vector(4, 1.0);  // not a solution of this instance
  CHECK_THROWS_AS((void)problem_from_json(bad), IoError);

  // A null solution field parses to an absent solution.
  const VIProblem adhoc{VIOperator(AffineOperator{DenseMatrix::identity(2), Vector(2, 0.0)},
                                   Monotonicity::monotone),
                        WholeSpace{2}, std::nullopt, "", 0, 2, 0};
  const json ja = problem_to_json(adhoc);
  CHECK(ja.at("known_solution").is_null());
  CHECK_FALSE(problem_from_json(ja).known_solution.has_value());
}

TEST_CASE("solver configs round-trip through json") {
  SolverConfig cfg = default_config_for(Algorithm::alg1);
  cfg.alpha.values = {0.0, 0.05, 0.1};
  cfg.stopping.eps_residual = 1e-6;
  cfg.start.kind = StartPoint::Kind::explicit_vec;
  cfg.start.value = Vector{1.0, 2.0};
  cfg.check_invariants = true;
  const json j = config_to_json(cfg);
  const SolverConfig back = config_from_json(json::parse(j.dump()));
  CHECK(config_to_json(back) == j);
  CHECK(back.alpha.values == cfg.alpha.values);
  CHECK(back.stopping.eps_residual == 1e-6);
  CHECK(back.start.value == cfg.start.value);

  SolverConfig fixed = default_config_for(Algorithm::spm_fixed);
  const SolverConfig fixed_back = config_from_json(config_to_json(fixed));
  REQUIRE(fixed_back.lambda.has_value());
  CHECK(*fixed_back.lambda == 0.5);

  // Partial configs fall back to defaults.
  const SolverConfig sparse = config_from_json(json::parse(R"({"algorithm":"opm"})"));
  CHECK(sparse.algorithm == Algorithm::opm);
  CHECK(sparse.gamma == 0.1);
  CHECK(sparse.stopping.max_iter == 100000);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"algorithm":"simplex"})")), IoError);
  CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"algorithm":"alg1","typo":1})")),
                  IoError);
  CHECK_THROWS_AS((void)config_from_json(json::parse(R"({"algorithm":"alg1","alpha":"x"})")),
                  IoError);
  CHECK_THROWS_AS(
      (void)config_from_json(json::parse(R"({"algorithm":"alg1","start":"e2"})")), IoError);
  CHECK_THROWS_AS((void)config_from_json(
                      json::parse(R"({"algorithm":"alg1","stopping":{"iters":5}})")),
                  IoError);
  CHECK_THROWS_AS((void)load_config("/nonexistent/vikit/config.json"), IoError);
  CHECK_THROWS_AS((void)load_problem("/nonexistent/vikit/problem.json"), IoError);
}

TEST_CASE("run reports serialize with optional invariant block") {
  const VIProblem p = make_hp_instance(4, 3, 7);
  SolverConfig cfg = default_config_for(Algorithm::alg1);
  const RunReport plain = solve(p, cfg);
  const json jp = report_to_json(plain);
  CHECK(jp.at("algorithm") == "alg1");
  CHECK(jp.at("converged") == true);
  CHECK(jp.at("termination") == "x_norm");
  CHECK(jp.at("invariants").is_null());
  CHECK(jp.at("final_x_norm").get<double>() == norm(plain.final_x));
  CHECK(jp.at("final_x").get<Vector>() == plain.final_x);

  cfg.check_invariants = true;
  const RunReport checked = solve(p, cfg);
  const json jc = report_to_json(checked);
  REQUIRE(jc.at("invariants").is_object());
  CHECK(jc.at("invariants").at("total") == 0);
  CHECK(jc.at("invariants").at("rate_checked") == true);
  CHECK(jc.at("invariants").at("checked_iterations").get<long>() == checked.iterations);
}
