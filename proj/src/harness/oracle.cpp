#include "aspen/harness/oracle.hpp"

#include "aspen/init.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <fstream>
#include <sstream>

namespace aspen::harness {
namespace {

using Vec = Vector<double>;
using Mat = Eigen::MatrixXd;

struct FullPenalty {
  const FiniteSumProblem<double>& problem;
  std::vector<Index> all;

  explicit FullPenalty(const FiniteSumProblem<double>& p) : problem(p), all(full_sample(p.num_components())) {}

  double value(const Vec& x, double mu) const {
    CostMeter scratch;
    return penalty_value(PenaltyContext<double>(problem, mu, scratch), all, x);
  }

  Vec gradient(const Vec& x, double mu) const {
    CostMeter scratch;
    return penalty_gradient(PenaltyContext<double>(problem, mu, scratch), all, x);
  }

  // Central differences of the exact gradient, symmetrised.
  Mat hessian(const Vec& x, double mu) const {
    const Index n = x.size();
    Mat H(n, n);
    for (Index j = 0; j < n; ++j) {
      const double step = 1e-6 * (1.0 + std::abs(x(j)));
      Vec xp = x, xm = x;
      xp(j) += step;
      xm(j) -= step;
      H.col(j) = (gradient(xp, mu) - gradient(xm, mu)) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
  }
};

// Newton direction on the eigenvalue-modified Hessian (|lambda| floored).
Vec modified_newton_direction(const Mat& H, const Vec& g) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(H);
  Vec lambda = eig.eigenvalues().cwiseAbs();
  const double floor = std::max(1e-10, 1e-12 * lambda.maxCoeff());
  lambda = lambda.cwiseMax(floor);
  const Mat& V = eig.eigenvectors();
  return -(V * (V.transpose() * g).cwiseQuotient(lambda));
}

// Drives ||grad F(x, mu)|| down to `target` or until progress stalls.
void polish(const FullPenalty& F, Vec& x, double mu, double target, int max_iters) {
  Vec g = F.gradient(x, mu);
  for (int it = 0; it < max_iters && g.norm() > target; ++it) {
    const Vec d = modified_newton_direction(F.hessian(x, mu), g);
    Vec x_new = x + d;
    Vec g_new = F.gradient(x_new, mu);
    if (!(g_new.norm() < g.norm())) {
      const double f0 = F.value(x, mu);
      const double slope = g.dot(d);
      double t = 0.5;
      bool moved = false;
      for (int j = 0; j < 60; ++j, t *= 0.5) {
        x_new = x + t * d;
        if (F.value(x_new, mu) <= f0 + 1e-4 * t * slope) {
          moved = true;
          break;
        }
      }
      if (!moved) return;
      g_new = F.gradient(x_new, mu);
    }
    x = std::move(x_new);
    g = std::move(g_new);
  }
}

OracleSolution make_solution(const FiniteSumProblem<double>& problem, const Vec& x, double mu, double tol) {
  CostMeter scratch;
  const auto kkt = kkt_report(PenaltyContext<double>(problem, mu, scratch), x);
  OracleSolution out;
  out.x_star = x;
  out.mu = mu;
  out.tol = tol;
  out.kkt_stationarity = kkt.stationarity;
  out.kkt_feasibility = kkt.feasibility;
  return out;
}

}  // namespace

OracleSolution compute_reference(const FiniteSumProblem<double>& problem, double tol, const OracleOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("oracle: tol must be > 0");

  SolverConfig cfg = SolverConfig::defaults_for(problem.num_components());
  cfg.n0 = problem.num_components();
  cfg.budget_fev = options.full_budget_fev;
  cfg.kkt_tol = tol;
  cfg.seed = options.seed;
  const Vec x0 = gaussian_normalized_init<double>(problem.dim(), options.seed);
  const auto warm = full_run(problem, cfg, x0);

  FullPenalty F(problem);
  Vec x = warm.x;
  double mu = std::max(warm.mu, 1.0);
  OracleSolution best = make_solution(problem, x, mu, tol);
  for (int round = 0; round <= options.max_continuations; ++round) {
    polish(F, x, mu, 0.1 * tol, options.max_newton_iters);
    best = make_solution(problem, x, mu, tol);
    if (best.kkt_stationarity <= tol && best.kkt_feasibility <= tol) return best;
    if (best.kkt_feasibility > 0.1 * tol) {
      // h ~ lambda / mu, so the feasibility shrinks in proportion to 1/mu.
      const double wanted = mu * best.kkt_feasibility / (0.1 * tol);
      mu = std::min(10.0 * mu, std::max(2.0 * mu, wanted));
    }
  }
  throw OracleFailure(fmt::format("oracle did not reach tol {} (stationarity {}, feasibility {}, mu {})", tol,
                                  best.kkt_stationarity, best.kkt_feasibility, best.mu),
                      best);
}

KktReport<double> verify_oracle(const FiniteSumProblem<double>& problem, const OracleSolution& oracle) {
  CostMeter scratch;
  return kkt_report(PenaltyContext<double>(problem, oracle.mu, scratch), oracle.x_star);
}

std::string oracle_to_json(const OracleSolution& oracle) {
  nlohmann::ordered_json j;
  j["provenance"] = oracle.provenance;
  j["tol"] = oracle.tol;
  j["mu"] = oracle.mu;
  j["kkt_stationarity"] = oracle.kkt_stationarity;
  j["kkt_feasibility"] = oracle.kkt_feasibility;
  j["x_star"] = std::vector<double>(oracle.x_star.data(), oracle.x_star.data() + oracle.x_star.size());
  return j.dump(2) + "\n";
}

OracleSolution oracle_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  OracleSolution out;
  out.provenance = j.at("provenance").get<std::string>();
  out.tol = j.at("tol").get<double>();
  out.mu = j.at("mu").get<double>();
  out.kkt_stationarity = j.at("kkt_stationarity").get<double>();
  out.kkt_feasibility = j.at("kkt_feasibility").get<double>();
  const auto xs = j.at("x_star").get<std::vector<double>>();
  out.x_star = Eigen::Map<const Vec>(xs.data(), static_cast<Index>(xs.size()));
  return out;
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::filesystem::path oracle_cache_path(const std::filesystem::path& cache_dir, const std::string& provenance) {
  return cache_dir / ("oracle_" + provenance + ".json");
}

OracleSolution load_or_compute_reference(const FiniteSumProblem<double>& problem, const std::string& identity,
                                         double tol, const std::filesystem::path& cache_dir,
                                         const OracleOptions& options) {
  const std::string provenance =
      content_hash(fmt::format("{}|tol={}|full_budget={}|seed={}|newton={}|cont={}", identity, tol,
                               options.full_budget_fev, options.seed, options.max_newton_iters,
                               options.max_continuations));
  const auto path = oracle_cache_path(cache_dir, provenance);
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    OracleSolution cached = oracle_from_json(buf.str());
    const auto kkt = verify_oracle(problem, cached);
    if (cached.provenance == provenance && cached.x_star.size() == problem.dim() && kkt.stationarity <= tol &&
        kkt.feasibility <= tol) {
      return cached;
    }
  }
  OracleSolution fresh = compute_reference(problem, tol, options);
  fresh.provenance = provenance;
  std::filesystem::create_directories(cache_dir);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write oracle cache '" + path.string() + "'");
  out << oracle_to_json(fresh);
  return fresh;
}

}  // namespace aspen::harness
