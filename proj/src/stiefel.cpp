#include "polyfs/stiefel.h"

#include <cmath>
#include <sstream>

#include "polyfs/error.h"
#include "polyfs/random.h"

namespace polyfs {

namespace {

constexpr int kMaxShrinks = 60;
constexpr double kDegenerate = 1e-16;
constexpr double kRankTolerance = 1e-12;

// Frobenius inner product.
double inner(const Eigen::MatrixXd &X, const Eigen::MatrixXd &Y) {
  return X.cwiseProduct(Y).sum();
}

}  // namespace

SimplexWeights::SimplexWeights(double alpha, double beta, double gamma)
    : alpha_(alpha), beta_(beta), gamma_(gamma) {
  // Grid points are built as 1 - alpha - beta, so allow rounding slack on the
  // lower bound.
  constexpr double slack = 1e-12;
  if (!(alpha >= kMinWeight - slack && beta >= kMinWeight - slack &&
        gamma >= kMinWeight - slack)) {
    std::ostringstream msg;
    msg << "direction weights (" << alpha << ", " << beta << ", " << gamma
        << ") must each be at least " << kMinWeight;
    throw ConfigError(msg.str());
  }
  if (!(std::abs(alpha + beta + gamma - 1.0) <= slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "direction weights must sum to 1, got " << alpha + beta + gamma;
    throw ConfigError(msg.str());
  }
}

double SearchConfig::resolved_eps_grad(Eigen::Index d, Eigen::Index k) const {
  return eps_grad ? *eps_grad
                  : 1e-4 * std::sqrt(static_cast<double>(d * k));
}

void SearchConfig::validate() const {
  auto fail = [](const std::string &what) { throw ConfigError(what); };
  if (eps_grad && !(*eps_grad > 0.0)) fail("eps_grad must be positive");
  if (!(dt_min > 0.0 && dt_min < dt_max)) {
    fail("step bounds must satisfy 0 < dt_min < dt_max");
  }
  if (!(dt_init > 0.0)) fail("dt_init must be positive");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0, 1)");
  if (max_iters < 0) fail("max_iters must be non-negative");
}

StiefelPoint init_stiefel(Eigen::Index d, Eigen::Index k, std::uint64_t seed) {
  if (d < k) {
    throw DimensionError("cannot place " + std::to_string(k) +
                         " orthonormal columns in dimension " +
                         std::to_string(d));
  }
  Rng rng(seed);
  Eigen::MatrixXd M(d, k);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) M(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
  const Eigen::MatrixXd &R = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return StiefelPoint(std::move(Q), 1e-10);
}

Eigen::MatrixXd riemannian_gradient(const Eigen::MatrixXd &W,
                                    const Eigen::MatrixXd &G) {
  return G - W * (G.transpose() * W);
}

TangentDirections tangent_directions(const StiefelPoint &W,
                                     const Eigen::MatrixXd &G) {
  const Eigen::MatrixXd &w = W.matrix();
  TangentDirections t;
  t.F1 = riemannian_gradient(w, G);
  t.F2 = G - w * (w.transpose() * G);
  t.F3 = 0.5 * t.F2;
  return t;
}

Eigen::MatrixXd hybrid_direction(const StiefelPoint &W,
                                 const Eigen::MatrixXd &G,
                                 const SimplexWeights &weights) {
  const Eigen::MatrixXd &w = W.matrix();
  // F3 = F2 / 2, so the blend needs only two products.
  const Eigen::MatrixXd F2 = G - w * (w.transpose() * G);
  return weights.alpha() * riemannian_gradient(w, G) +
         (weights.beta() + 0.5 * weights.gamma()) * F2;
}

double bb_step(int m, const Eigen::MatrixXd &S, const Eigen::MatrixXd &O,
               const SearchConfig &cfg) {
  if (m < 0) throw ConfigError("BB iteration index must be non-negative");
  const double so = std::abs(inner(S, O));
  const double oo = O.squaredNorm();
  if (so < kDegenerate || std::sqrt(oo) < kDegenerate) return cfg.dt_init;
  const double dt = (m % 2 == 0) ? S.squaredNorm() / so : so / oo;
  if (!std::isfinite(dt)) return cfg.dt_init;
  return std::max(std::min(dt, cfg.dt_max), cfg.dt_min);
}

StiefelPoint retract(const Eigen::MatrixXd &Q) {
  if (Q.rows() < Q.cols()) {
    throw DimensionError("retraction needs a tall matrix");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sigma = svd.singularValues();
  if (sigma.size() > 0 &&
      !(sigma(sigma.size() - 1) >= kRankTolerance * sigma(0))) {
    std::ostringstream msg;
    msg << "retraction input is rank deficient (singular values " << sigma(0)
        << " .. " << sigma(sigma.size() - 1)
        << "); reduce the step length";
    throw NumericalError(msg.str());
  }
  return StiefelPoint(svd.matrixU() * svd.matrixV().transpose());
}

Eigen::MatrixXd tangent_step(const StiefelPoint &W, const Eigen::MatrixXd &F,
                             double dt_prev, double dt_curr) {
  return W.matrix() - (0.5 * (dt_prev + dt_curr)) * F;
}

MinimizeResult minimize(const CenteredProblem &p, const SimplexWeights &weights,
                        const SearchConfig &cfg) {
  cfg.validate();
  return minimize(p, weights, cfg, init_stiefel(p.d, p.k, cfg.seed));
}

MinimizeResult minimize(const CenteredProblem &p, const SimplexWeights &weights,
                        const SearchConfig &cfg, const StiefelPoint &W0) {
  cfg.validate();
  if (W0.rows() != p.d || W0.cols() != p.k) {
    throw DimensionError("starting point shape does not match the problem");
  }
  const double eps = cfg.resolved_eps_grad(p.d, p.k);
  const bool hybrid = cfg.mode == SearchMode::Hybrid;

  StiefelPoint W = W0;
  detail::Evaluation eval = detail::evaluate(p, W.matrix());
  if (!std::isfinite(eval.value)) {
    throw NumericalError("objective is not finite at the starting point");
  }
  Eigen::MatrixXd G = detail::gradient_from(p, eval);
  Eigen::MatrixXd rgrad = riemannian_gradient(W.matrix(), G);

  DescentTrace trace;
  trace.mode = cfg.mode;
  double C = eval.value;  // non-monotone reference
  double P = 1.0;         // its accumulated weight
  double dt = cfg.dt_init;
  double dt_prev = 0.0;

  auto record = [&](double f, double gnorm, double orth) {
    trace.f_values.push_back(f);
    trace.grad_norms.push_back(gnorm);
    trace.reference_values.push_back(C);
    trace.orthonormality.push_back(orth);
  };
  record(eval.value, rgrad.norm(), orthonormality_error(W.matrix()));

  for (int m = 0;; ++m) {
    if (trace.grad_norms.back() <= eps) {
      trace.converged = true;
      break;
    }
    if (m >= cfg.max_iters) break;

    Eigen::MatrixXd F = hybrid ? hybrid_direction(W, G, weights) : rgrad;
    double slope = inner(G, F);  // -Df(W)[-F]
    if (!(slope > 0.0) && hybrid) {
      F = rgrad;
      slope = inner(G, F);
      trace.direction_fallbacks.push_back(m);
    }

    const Eigen::MatrixXd WtF = W.matrix().transpose() * F;
    trace.tangency.push_back((WtF + WtF.transpose()).norm());

    // Averaging needs a previous step that came from the BB rule; the first
    // two iterations (dt_init, then the first BB step) have none.
    double tau = (hybrid && m > 1) ? 0.5 * (dt_prev + dt) : dt;
    int shrinks = 0;
    bool floored = false;
    std::optional<StiefelPoint> next;
    detail::Evaluation next_eval;
    while (true) {
      next.emplace(retract(W.matrix() - tau * F));
      next_eval = detail::evaluate(p, next->matrix());
      if (std::isfinite(next_eval.value) &&
          next_eval.value < C - cfg.rho * tau * slope) {
        break;
      }
      if (shrinks == kMaxShrinks || tau * cfg.delta < cfg.dt_min) {
        tau = cfg.dt_min;
        next.emplace(retract(W.matrix() - tau * F));
        next_eval = detail::evaluate(p, next->matrix());
        if (!std::isfinite(next_eval.value)) {
          throw NumericalError("objective became non-finite at iteration " +
                               std::to_string(m));
        }
        trace.floored_steps.push_back(m);
        floored = true;
        break;
      }
      tau *= cfg.delta;
      ++shrinks;
    }

    const Eigen::MatrixXd S = next->matrix() - W.matrix();
    W = std::move(*next);
    eval = std::move(next_eval);
    G = detail::gradient_from(p, eval);
    Eigen::MatrixXd rgrad_next = riemannian_gradient(W.matrix(), G);
    const Eigen::MatrixXd O = rgrad_next - rgrad;
    rgrad = std::move(rgrad_next);

    const double P_next = cfg.mu * P + 1.0;
    const double C_next = (cfg.mu * P * C + eval.value) / P_next;
    // An accepted trial has f < C, so C_next <= C in exact arithmetic; min()
    // absorbs rounding. A floored step may legitimately raise C.
    C = floored ? C_next : std::min(C, C_next);
    P = P_next;

    trace.accepted_steps.push_back(tau);
    trace.backtracks.push_back(shrinks);
    record(eval.value, rgrad.norm(), orthonormality_error(W.matrix()));
    ++trace.iterations;

    dt_prev = tau;
    dt = bb_step(m, S, O, cfg);
  }
  return {std::move(W), std::move(trace)};
}

}  // namespace polyfs
