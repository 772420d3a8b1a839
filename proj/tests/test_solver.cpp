#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aspen/harness/trace_io.hpp"
#include "aspen/hs24.hpp"
#include "aspen/init.hpp"
#include "aspen/libsvm.hpp"
#include "aspen/logistic.hpp"
#include "aspen/solver.hpp"
#include "mechanics.hpp"
#include "test_support.hpp"

using namespace aspen;
using aspen::testing::data_path;
using aspen::testing::QuadraticLinearProblem;

namespace {

// N identical components 0.5 ||x - c||^2 with no active constraint (a = 0, b = 0).
QuadraticLinearProblem identical_quadratics(Index n, Index N, const Vector<double>& center) {
  Eigen::MatrixXd centers(n, N);
  for (Index i = 0; i < N; ++i) centers.col(i) = center;
  return QuadraticLinearProblem(Eigen::MatrixXd::Identity(n, n), centers, Vector<double>::Zero(n), 0.0);
}

}  // namespace

TEST_CASE("acceptance check: stationary point with unchanged trial") {
  const auto p = identical_quadratics(2, 3, Vector<double>::Zero(2));
  CostMeter meter;
  const PenaltyContext<double> ctx(p, 1.0, meter);
  const Vector<double> x = Vector<double>::Zero(2);
  const std::vector<Index> d{1};
  CHECK(acceptance_check<double>(ctx, d, x, x, 0.5, 1e-4, 1.0));
  CHECK(meter.count() == value_gradient_cost(1) + value_cost(1));
}

TEST_CASE("acceptance check: clear violation") {
  // One component f = 0.5 x^2 in 1-D; F_D(x) = 0 at x = 0 and 10 at x = sqrt(20).
  const auto p = identical_quadratics(1, 1, Vector<double>::Zero(1));
  CostMeter meter;
  const PenaltyContext<double> ctx(p, 1.0, meter);
  const Vector<double> x = Vector<double>::Zero(1);
  const Vector<double> trial = Vector<double>::Constant(1, std::sqrt(20.0));
  const std::vector<Index> d{0};
  CHECK_FALSE(acceptance_check<double>(ctx, d, x, trial, 1.0, 0.5, 1.0));
}

TEST_CASE("acceptance check mirrors the line-search inequality on one component") {
  // With D = N = {0} the check is the Armijo test with (c, C eps) in place of (eta alpha, eps).
  const auto p = identical_quadratics(2, 1, (Vector<double>(2) << 1.0, -2.0).finished());
  CostMeter meter;
  const PenaltyContext<double> ctx(p, 3.0, meter);
  const std::vector<Index> d{0};
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const Vector<double> x = aspen::testing::random_point(2, rng, 2.0);
    const Vector<double> trial = aspen::testing::random_point(2, rng, 2.0);
    const double eps = 0.01 * (t % 7);
    const double c = 0.05 * (1 + t % 5);
    const double lhs = aspen::testing::reference_penalty(p, d, trial, 3.0);
    const double f_x = aspen::testing::reference_penalty(p, d, x, 3.0);
    const double g_sq = aspen::testing::reference_gradient(p, d, x, 3.0).squaredNorm();
    const bool brute = lhs <= f_x - c * g_sq + 2.0 * eps;
    CHECK(acceptance_check<double>(ctx, d, x, trial, eps, c, 2.0) == brute);
  }
}

TEST_CASE("config validation") {
  auto cfg = SolverConfig::defaults_for(270);
  CHECK(cfg.n0 == 3);
  CHECK(cfg.mu0 == 1.0);
  CHECK(cfg.d_size == 1);
  CHECK(cfg.c == 1e-4);
  CHECK(cfg.C == 1.0);
  CHECK(cfg.gamma == 1.1);
  CHECK(cfg.line_search.beta == 0.1);
  CHECK(cfg.line_search.eta == 1e-4);
  CHECK_NOTHROW(cfg.validate(270));
  auto bad = cfg;
  bad.c = 1.0;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
  bad = cfg;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
  bad = cfg;
  bad.n0 = 271;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
  bad = cfg;
  bad.d_size = 4;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
  bad = cfg;
  bad.mu0 = 0.0;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
  bad = cfg;
  bad.C = 0.0;
  CHECK_THROWS_AS(bad.validate(270), std::invalid_argument);
}

TEST_CASE("zero iteration budget returns x0 and an empty trace") {
  const LogisticProblem<double> p(load_libsvm(data_path("tiny10.libsvm")));
  auto cfg = SolverConfig::defaults_for(10);
  cfg.budget_iters = 0;
  const Vector<double> x0 = gaussian_normalized_init(5, 3);
  const auto r = aspen_run(p, cfg, x0);
  CHECK(r.x == x0);
  CHECK(r.trace.empty());
  CHECK(r.termination == Termination::IterationBudget);
  CHECK(r.fev == 0);
}

TEST_CASE("feasible iterate keeps mu in the mini-batch phase") {
  aspen::testing::ShiftedSphereProblem p(3, 50);
  auto cfg = SolverConfig::defaults_for(50);
  SolverState<double> state(Vector<double>::Unit(3, 1), 1.0, cfg.n0, 0);
  REQUIRE(p.constraint_value(state.x)(0) == 0.0);
  const auto r = aspen_step(state, p, cfg);
  CHECK(r.phase == Phase::MiniBatch);
  CHECK(state.mu == 1.0);
}

TEST_CASE("full-sample penalty update follows the 1/mu test") {
  const Vector<double> center = Vector<double>::Zero(2);
  const auto p = identical_quadratics(2, 4, center);
  auto cfg = SolverConfig::defaults_for(4);
  {
    SolverState<double> state((Vector<double>(2) << 0.5, 0.0).finished(), 1.0, 4, 0);
    const auto r = full_step(state, p, cfg);
    CHECK(r.grad_norm == doctest::Approx(0.5));
    CHECK(r.accepted);
    CHECK(state.mu == 1.1);
  }
  {
    SolverState<double> state((Vector<double>(2) << 1.5, 0.0).finished(), 1.0, 4, 0);
    full_step(state, p, cfg);
    CHECK(state.mu == 1.0);
  }
  {
    // ASPEN with n_k = N takes the same branch.
    SolverState<double> state((Vector<double>(2) << 0.5, 0.0).finished(), 1.0, 4, 0);
    const auto r = aspen_step(state, p, cfg);
    CHECK(r.phase == Phase::FullSample);
    CHECK(state.mu == 1.1);
  }
}

TEST_CASE("rejected mini-batch step keeps x and grows N") {
  const NoisyHs24Problem<double> p(NoisyHs24Spec::draw(200, 2.0, 1));
  auto cfg = SolverConfig::defaults_for(200);
  cfg.n0 = 2;
  SolverState<double> state(gaussian_normalized_init(2, 5), cfg.mu0, cfg.n0, 5);
  bool saw_reject = false;
  for (int k = 0; k < 3000 && !saw_reject && state.sample.n_k < 200; ++k) {
    const Vector<double> before = state.x;
    const Index n_before = state.sample.n_k;
    const auto r = aspen_step(state, p, cfg);
    if (!r.accepted) {
      saw_reject = true;
      CHECK(state.x == before);
      CHECK(state.sample.n_k >= n_before + 1);
    }
  }
  CHECK(saw_reject);
}

TEST_CASE("Heur grows sample and penalty together") {
  const Vector<double> center = Vector<double>::Zero(2);
  const auto p = identical_quadratics(2, 100, center);
  auto cfg = SolverConfig::defaults_for(100);
  cfg.n0 = 10;
  SolverState<double> state((Vector<double>(2) << 0.3, 0.0).finished(), 1.0, 10, 0);
  const auto r = heur_step(state, p, cfg);
  CHECK(r.accepted);
  CHECK(state.sample.n_k == 11);
  CHECK(state.mu == doctest::Approx(1.1));

  SolverState<double> far((Vector<double>(2) << 3.0, 0.0).finished(), 1.0, 10, 0);
  heur_step(far, p, cfg);
  CHECK(far.sample.n_k == 10);
  CHECK(far.mu == 1.0);
}

TEST_CASE("Heur at full sample matches Full") {
  const LogisticProblem<double> p(load_libsvm(data_path("tiny10.libsvm")));
  auto cfg = SolverConfig::defaults_for(10);
  cfg.n0 = 10;
  cfg.budget_iters = 200;
  const Vector<double> x0 = gaussian_normalized_init(5, 9);
  const auto heur = heur_run(p, cfg, x0);
  const auto full = full_run(p, cfg, x0);
  CHECK(harness::trace_to_csv(heur.trace) == harness::trace_to_csv(full.trace));
}

TEST_CASE("ASPEN with N0 = N reproduces Full") {
  const LogisticProblem<double> p(load_libsvm(data_path("heart_synth.libsvm")));
  auto cfg = SolverConfig::defaults_for(270);
  cfg.n0 = 270;
  cfg.budget_fev = 20000;
  const Vector<double> x0 = gaussian_normalized_init(13, 2);
  const auto a = aspen_run(p, cfg, x0);
  const auto f = full_run(p, cfg, x0);
  CHECK(harness::trace_to_csv(a.trace) == harness::trace_to_csv(f.trace));
  CHECK(a.x == f.x);
}

TEST_CASE("seed determinism") {
  const NoisyHs24Problem<double> p(NoisyHs24Spec::draw(100, 1.0, 3));
  auto cfg = SolverConfig::defaults_for(100);
  cfg.budget_fev = 5000;
  const Vector<double> x0 = gaussian_normalized_init(2, 1);
  for (Method m : {Method::Aspen, Method::Full, Method::Heur}) {
    cfg.seed = 7;
    const auto a = solve(m, p, cfg, x0);
    const auto b = solve(m, p, cfg, x0);
    CHECK(harness::trace_to_csv(a.trace) == harness::trace_to_csv(b.trace));
  }
  cfg.seed = 8;
  const auto c = aspen_run(p, cfg, x0);
  cfg.seed = 7;
  CHECK(harness::trace_to_csv(c.trace) != harness::trace_to_csv(aspen_run(p, cfg, x0).trace));
}

TEST_CASE("trace rows: fev nondecreasing and budget respected") {
  const LogisticProblem<double> p(load_libsvm(data_path("heart_synth.libsvm")));
  auto cfg = SolverConfig::defaults_for(270);
  cfg.budget_fev = 30000;
  for (Method m : {Method::Aspen, Method::Full, Method::Heur}) {
    const auto r = solve(m, p, cfg, gaussian_normalized_init(13, 4));
    REQUIRE(!r.trace.empty());
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].fev >= r.trace[i - 1].fev);
      CHECK(r.trace[i].k == r.trace[i - 1].k + 1);
    }
    CHECK(r.termination == Termination::FevBudget);
    CHECK(r.trace[r.trace.size() - 2].fev < cfg.budget_fev);
    CHECK(r.fev == r.trace.back().fev);
  }
}

TEST_CASE("mu sequence of Full is mu0 gamma^j") {
  const LogisticProblem<double> p(load_libsvm(data_path("heart_synth.libsvm")));
  auto cfg = SolverConfig::defaults_for(270);
  cfg.budget_fev = 100000;
  const auto r = full_run(p, cfg, gaussian_normalized_init(13, 0));
  int fired = 0;
  double expected = cfg.mu0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].mu_k == expected);
    if (r.trace[i].grad_norm < 1.0 / r.trace[i].mu_k) {
      expected *= cfg.gamma;
      ++fired;
    }
  }
  CHECK(fired >= 3);
}

TEST_CASE("HS24 run drives feasibility below 1e-2 within 1e5 FEV") {
  const NoisyHs24Problem<double> p(NoisyHs24Spec::draw(100, 0.1, 0));
  auto cfg = SolverConfig::defaults_for(100);
  cfg.budget_fev = 100000;
  cfg.seed = 0;
  const auto r = aspen_run(p, cfg, gaussian_normalized_init(2, 0));
  CHECK(constraint_violation<double>(p, r.x) <= 1e-2);
}

TEST_CASE("mechanics invariants on small fixtures") {
  const LogisticProblem<double> tiny(load_libsvm(data_path("tiny10.libsvm")));
  auto cfg = SolverConfig::defaults_for(10);
  for (std::uint64_t seed : {0, 1, 2}) {
    cfg.seed = seed;
    const auto report = aspen::testing::check_aspen_mechanics(tiny, cfg, gaussian_normalized_init(5, seed), 300);
    CHECK(report.violations.empty());
    if (!report.violations.empty()) MESSAGE(report.violations.front());
  }
  const NoisyHs24Problem<double> hs(NoisyHs24Spec::draw(10, 1.0, 2));
  cfg.seed = 3;
  const auto report = aspen::testing::check_aspen_mechanics(hs, cfg, gaussian_normalized_init(2, 3), 300);
  CHECK(report.violations.empty());
  CHECK(report.rejected > 0);
}

TEST_CASE("monitor values are uncharged") {
  const LogisticProblem<double> p(load_libsvm(data_path("heart_synth.libsvm")));
  auto cfg = SolverConfig::defaults_for(270);
  cfg.budget_iters = 50;
  const Vector<double> x0 = gaussian_normalized_init(13, 1);
  TraceMonitor<double> monitor;
  monitor.full_gradient = true;
  monitor.x_star = Vector<double>::Unit(13, 0);
  const auto plain = aspen_run(p, cfg, x0);
  const auto watched = aspen_run(p, cfg, x0, monitor);
  REQUIRE(plain.trace.size() == watched.trace.size());
  for (std::size_t i = 0; i < plain.trace.size(); ++i) {
    CHECK(plain.trace[i].fev == watched.trace[i].fev);
    CHECK(std::isnan(plain.trace[i].gap));
    CHECK(std::isfinite(watched.trace[i].gap));
    CHECK(std::isfinite(watched.trace[i].full_grad_norm));
  }
}

TEST_CASE("line-search failure ends the run without throwing") {
  const LogisticProblem<double> p(load_libsvm(data_path("heart_synth.libsvm")));
  auto cfg = SolverConfig::defaults_for(270);
  cfg.line_search.j_max = 1;
  cfg.epsilon.exponent = 50.0;
  cfg.mu0 = 1e8;
  cfg.budget_iters = 100;
  const auto r = full_run(p, cfg, (gaussian_normalized_init(13, 1) * 3.0).eval());
  CHECK(r.termination == Termination::LineSearchFailure);
  CHECK(r.message.find("line search failed") != std::string::npos);
}
