#include "wise/aggregate/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wise/errors.hpp"

namespace wise::aggregate {

namespace {

constexpr double kStochasticTol = 1e-9;

void check_counts_for_fit(const VoteCounts& counts) {
  counts.validate();
  if (counts.item_count == 0) throw EmptyInput("no items to fit");
  if (counts.solver_count == 0) throw EmptyInput("no solver vote tensors");
  if (counts.class_count < 2) {
    throw ConfigError("answer confusion needs at least two classes");
  }
}

void check_options(const EmOptions& o) { o.validate(); }

std::vector<double> smooth_normalize(const std::vector<double>& raw,
                                     double eps) {
  std::vector<double> out(raw.size());
  double total = 0.0;
  for (double v : raw) total += v + eps;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] + eps) / total;
  return out;
}

bool relative_step_below(double ll, double prev, double tol) {
  const double denom = std::max(1.0, std::abs(prev));
  return std::abs(ll - prev) / denom < tol;
}

}  // namespace

void EmOptions::validate() const {
  if (!(tol > 0.0)) throw ConfigError("EM tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("EM needs at least one iteration");
  if (!(smoothing > 0.0) || smoothing > 1.0) {
    throw ConfigError("EM smoothing must lie in (0, 1]");
  }
}

void ConfusionModel::validate(double tol) const {
  const int K = class_count();
  const int J = weight_class_count();
  if (!class_codes.empty() && static_cast<int>(class_codes.size()) != K) {
    throw DimensionMismatch("class codes do not match answer prior size");
  }
  auto check_prior = [tol](const std::vector<double>& prior, const char* what) {
    if (prior.empty()) return;
    double s = 0.0;
    for (double v : prior) {
      if (!(v > 0.0)) throw NonFinite(std::string(what) + " prior entry not positive");
      s += v;
    }
    if (std::abs(s - 1.0) > tol) {
      throw NonFinite(std::string(what) + " prior does not sum to one");
    }
  };
  check_prior(answer_prior, "answer");
  check_prior(weight_prior, "weight");

  auto check_rows = [tol](const Matrix& m, int expected, const char* what) {
    if (m.rows() != expected || m.cols() != expected) {
      throw DimensionMismatch(std::string(what) + " confusion has wrong shape");
    }
    for (int r = 0; r < m.rows(); ++r) {
      double s = 0.0;
      for (int c = 0; c < m.cols(); ++c) {
        if (!(m.at(r, c) > 0.0)) {
          throw NonFinite(std::string(what) + " confusion entry not positive");
        }
        s += m.at(r, c);
      }
      if (std::abs(s - 1.0) > tol) {
        throw NonFinite(std::string(what) + " confusion row does not sum to one");
      }
    }
  };
  for (const auto& m : solver_confusion) check_rows(m, K, "solver");
  for (const auto& m : reflector_confusion) check_rows(m, J, "reflector");
}

std::vector<double> Responsibilities::answer_marginal(int item) const {
  const Matrix& g = gamma.at(item);
  std::vector<double> out(g.cols(), 0.0);
  for (int a = 0; a < g.rows(); ++a) {
    for (int b = 0; b < g.cols(); ++b) out[b] += g.at(a, b);
  }
  return out;
}

std::vector<double> Responsibilities::weight_marginal(int item) const {
  const Matrix& g = gamma.at(item);
  std::vector<double> out(g.rows(), 0.0);
  for (int a = 0; a < g.rows(); ++a) {
    for (int b = 0; b < g.cols(); ++b) out[a] += g.at(a, b);
  }
  return out;
}

namespace {

int argmax_first(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

int Responsibilities::map_answer(int item) const {
  return argmax_first(answer_marginal(item));
}

int Responsibilities::map_weight(int item) const {
  return argmax_first(weight_marginal(item));
}

void Responsibilities::validate(double tol) const {
  for (const auto& g : gamma) {
    double s = 0.0;
    for (int a = 0; a < g.rows(); ++a) {
      for (int b = 0; b < g.cols(); ++b) {
        const double v = g.at(a, b);
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw NonFinite("responsibility entry is negative or non-finite");
        }
        s += v;
      }
    }
    if (std::abs(s - 1.0) > tol) {
      throw NonFinite("responsibilities do not sum to one");
    }
  }
}

// ---------------------------------------------------------------------------
// Classic single-role Dawid-Skene.
// ---------------------------------------------------------------------------

namespace {

struct ClassicParams {
  std::vector<double> zeta;          // K
  std::vector<Matrix> confusion;     // T, each K x K
};

ClassicParams classic_m_step(const VoteCounts& c,
                             const std::vector<std::vector<double>>& post,
                             double eps) {
  const int K = c.class_count;
  const int T = c.solver_count;
  ClassicParams p;

  std::vector<double> nb(K, 0.0);
  for (int i = 0; i < c.item_count; ++i) {
    for (int b = 0; b < K; ++b) nb[b] += post[i][b];
  }
  p.zeta = smooth_normalize(nb, eps);

  p.confusion.reserve(T);
  for (int t = 0; t < T; ++t) {
    Matrix m(K, K);
    for (int b = 0; b < K; ++b) {
      std::vector<double> row(K, 0.0);
      for (int i = 0; i < c.item_count; ++i) {
        const double w = post[i][b];
        if (w == 0.0) continue;
        for (int b1 = 0; b1 < K; ++b1) row[b1] += w * c.solver_counts[t][i][b1];
      }
      const auto norm = smooth_normalize(row, eps);
      for (int b1 = 0; b1 < K; ++b1) m.at(b, b1) = norm[b1];
    }
    p.confusion.push_back(std::move(m));
  }
  return p;
}

ConfusionModel classic_to_model(const VoteCounts& c, const ClassicParams& p) {
  ConfusionModel m;
  m.class_codes = c.class_codes;
  m.answer_prior = p.zeta;
  m.solver_confusion = p.confusion;
  return m;
}

}  // namespace

EmResult classic_ds_em(const VoteCounts& counts, const EmOptions& options,
                       const IterationFn& on_iteration) {
  check_counts_for_fit(counts);
  check_options(options);
  const int K = counts.class_count;
  const int T = counts.solver_count;
  const int items = counts.item_count;

  std::vector<std::vector<double>> post(items, std::vector<double>(K, 0.0));
  for (int i = 0; i < items; ++i) {
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
      for (int b = 0; b < K; ++b) {
        post[i][b] += counts.solver_counts[t][i][b];
        total += counts.solver_counts[t][i][b];
      }
    }
    for (int b = 0; b < K; ++b) {
      post[i][b] = total > 0.0 ? post[i][b] / total : 1.0 / K;
    }
  }
  ClassicParams params = classic_m_step(counts, post, options.smoothing);

  EmResult res;
  double prev_ll = 0.0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    std::vector<double> log_zeta(K);
    for (int b = 0; b < K; ++b) log_zeta[b] = std::log(params.zeta[b]);
    std::vector<Matrix> log_conf;
    log_conf.reserve(T);
    for (int t = 0; t < T; ++t) {
      Matrix lm(K, K);
      for (int b = 0; b < K; ++b) {
        for (int b1 = 0; b1 < K; ++b1) {
          lm.at(b, b1) = std::log(params.confusion[t].at(b, b1));
        }
      }
      log_conf.push_back(std::move(lm));
    }

    double ll = 0.0;
    for (int i = 0; i < items; ++i) {
      std::vector<double> logu(K);
      for (int b = 0; b < K; ++b) {
        double acc = log_zeta[b];
        for (int t = 0; t < T; ++t) {
          for (int b1 = 0; b1 < K; ++b1) {
            const int cnt = counts.solver_counts[t][i][b1];
            if (cnt != 0) acc += cnt * log_conf[t].at(b, b1);
          }
        }
        logu[b] = acc;
      }
      const double peak = *std::max_element(logu.begin(), logu.end());
      double z = 0.0;
      for (int b = 0; b < K; ++b) z += std::exp(logu[b] - peak);
      const double logz = peak + std::log(z);
      if (!std::isfinite(logz)) throw NonFinite("item likelihood is non-finite");
      for (int b = 0; b < K; ++b) post[i][b] = std::exp(logu[b] - logz);
      ll += logz;
    }
    if (!std::isfinite(ll)) throw NonFinite("log-likelihood is non-finite");

    // A decrease can only come from the smoothing pseudo-counts nudging a
    // converged fit off its plateau; stop on the recorded ascent instead.
    if (iter >= 2 && ll < prev_ll) {
      res.converged = true;
      break;
    }

    res.log_likelihood_trace.push_back(ll);
    res.iterations = iter;
    params = classic_m_step(counts, post, options.smoothing);
    if (on_iteration) on_iteration(iter, classic_to_model(counts, params), ll);

    if (iter >= 2 && relative_step_below(ll, prev_ll, options.tol)) {
      res.converged = true;
      break;
    }
    prev_ll = ll;
  }

  res.model = classic_to_model(counts, params);
  res.model.validate(kStochasticTol);
  res.responsibilities.gamma.reserve(items);
  for (int i = 0; i < items; ++i) {
    Matrix g(1, K);
    for (int b = 0; b < K; ++b) g.at(0, b) = post[i][b];
    res.responsibilities.gamma.push_back(std::move(g));
  }
  res.responsibilities.validate();
  return res;
}

// ---------------------------------------------------------------------------
// Two-role joint fit.
// ---------------------------------------------------------------------------

namespace {

struct JointParams {
  std::vector<double> zeta_beta;   // K
  std::vector<double> zeta_alpha;  // J
  std::vector<Matrix> solver;      // T, K x K
  std::vector<Matrix> reflector;   // C, J x J
};

JointParams joint_m_step(const VoteCounts& c, int J,
                         const std::vector<Matrix>& gamma, double eps) {
  const int K = c.class_count;
  const int T = c.solver_count;
  const int C = c.reflector_count;

  std::vector<std::vector<double>> p_beta(c.item_count,
                                          std::vector<double>(K, 0.0));
  std::vector<std::vector<double>> p_alpha(c.item_count,
                                           std::vector<double>(J, 0.0));
  for (int i = 0; i < c.item_count; ++i) {
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < K; ++b) {
        p_beta[i][b] += gamma[i].at(a, b);
        p_alpha[i][a] += gamma[i].at(a, b);
      }
    }
  }

  JointParams p;
  std::vector<double> nb(K, 0.0);
  std::vector<double> na(J, 0.0);
  for (int i = 0; i < c.item_count; ++i) {
    for (int b = 0; b < K; ++b) nb[b] += p_beta[i][b];
    for (int a = 0; a < J; ++a) na[a] += p_alpha[i][a];
  }
  p.zeta_beta = smooth_normalize(nb, eps);
  p.zeta_alpha = smooth_normalize(na, eps);

  p.solver.reserve(T);
  for (int t = 0; t < T; ++t) {
    Matrix m(K, K);
    for (int b = 0; b < K; ++b) {
      std::vector<double> row(K, 0.0);
      for (int i = 0; i < c.item_count; ++i) {
        const double w = p_beta[i][b];
        if (w == 0.0) continue;
        for (int b1 = 0; b1 < K; ++b1) row[b1] += w * c.solver_counts[t][i][b1];
      }
      const auto norm = smooth_normalize(row, eps);
      for (int b1 = 0; b1 < K; ++b1) m.at(b, b1) = norm[b1];
    }
    p.solver.push_back(std::move(m));
  }

  p.reflector.reserve(C);
  for (int cc = 0; cc < C; ++cc) {
    Matrix m(J, J);
    for (int a = 0; a < J; ++a) {
      std::vector<double> row(J, 0.0);
      for (int i = 0; i < c.item_count; ++i) {
        const double w = p_alpha[i][a];
        if (w == 0.0) continue;
        for (int b2 = 0; b2 < J; ++b2) {
          row[b2] += w * c.reflector_counts[cc][i][b2];
        }
      }
      const auto norm = smooth_normalize(row, eps);
      for (int b2 = 0; b2 < J; ++b2) m.at(a, b2) = norm[b2];
    }
    p.reflector.push_back(std::move(m));
  }
  return p;
}

ConfusionModel joint_to_model(const VoteCounts& c, const JointParams& p) {
  ConfusionModel m;
  m.class_codes = c.class_codes;
  m.answer_prior = p.zeta_beta;
  m.weight_prior = p.zeta_alpha;
  m.solver_confusion = p.solver;
  m.reflector_confusion = p.reflector;
  return m;
}

struct EStepOut {
  std::vector<Matrix> gamma;
  double ll = 0.0;
};

EStepOut joint_e_step(const VoteCounts& counts, int J, const JointParams& params) {
  const int K = counts.class_count;
  const int T = counts.solver_count;
  const int C = counts.reflector_count;
  const int items = counts.item_count;

  std::vector<double> log_zb(K);
  std::vector<double> log_za(J);
  for (int b = 0; b < K; ++b) log_zb[b] = std::log(params.zeta_beta[b]);
  for (int a = 0; a < J; ++a) log_za[a] = std::log(params.zeta_alpha[a]);
  std::vector<Matrix> log_solver;
  log_solver.reserve(T);
  for (int t = 0; t < T; ++t) {
    Matrix lm(K, K);
    for (int b = 0; b < K; ++b) {
      for (int b1 = 0; b1 < K; ++b1) {
        lm.at(b, b1) = std::log(params.solver[t].at(b, b1));
      }
    }
    log_solver.push_back(std::move(lm));
  }
  std::vector<Matrix> log_reflector;
  log_reflector.reserve(C);
  for (int cc = 0; cc < C; ++cc) {
    Matrix lm(J, J);
    for (int a = 0; a < J; ++a) {
      for (int b2 = 0; b2 < J; ++b2) {
        lm.at(a, b2) = std::log(params.reflector[cc].at(a, b2));
      }
    }
    log_reflector.push_back(std::move(lm));
  }

  EStepOut out;
  out.gamma.assign(items, Matrix(J, K));
  for (int i = 0; i < items; ++i) {
    std::vector<double> solver_term(K);
    for (int b = 0; b < K; ++b) {
      double acc = 0.0;
      for (int t = 0; t < T; ++t) {
        for (int b1 = 0; b1 < K; ++b1) {
          const int cnt = counts.solver_counts[t][i][b1];
          if (cnt != 0) acc += cnt * log_solver[t].at(b, b1);
        }
      }
      solver_term[b] = acc;
    }
    std::vector<double> reflector_term(J, 0.0);
    for (int a = 0; a < J; ++a) {
      double acc = 0.0;
      for (int cc = 0; cc < C; ++cc) {
        for (int b2 = 0; b2 < J; ++b2) {
          const int cnt = counts.reflector_counts[cc][i][b2];
          if (cnt != 0) acc += cnt * log_reflector[cc].at(a, b2);
        }
      }
      reflector_term[a] = acc;
    }

    Matrix logu(J, K);
    double peak = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < K; ++b) {
        const double v = log_za[a] + log_zb[b] + reflector_term[a] + solver_term[b];
        logu.at(a, b) = v;
        if (v > peak) peak = v;
      }
    }
    double z = 0.0;
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < K; ++b) z += std::exp(logu.at(a, b) - peak);
    }
    const double logz = peak + std::log(z);
    if (!std::isfinite(logz)) throw NonFinite("item likelihood is non-finite");
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < K; ++b) {
        out.gamma[i].at(a, b) = std::exp(logu.at(a, b) - logz);
      }
    }
    out.ll += logz;
  }
  if (!std::isfinite(out.ll)) throw NonFinite("log-likelihood is non-finite");
  return out;
}

}  // namespace

EmResult wise_ds_em(const VoteCounts& counts, const EmOptions& options,
                    const IterationFn& on_iteration) {
  check_counts_for_fit(counts);
  check_options(options);
  const int K = counts.class_count;
  const int T = counts.solver_count;
  const int C = counts.reflector_count;
  // With no reflectors the weight variable has no observation channel and
  // marginalizes out exactly; a single degenerate class realizes that.
  const int J = C > 0 ? counts.weight_class_count : 1;
  if (C > 0 && J != model::kWeightClasses) {
    throw DimensionMismatch("reflector tensors must use the three weight classes");
  }
  const int items = counts.item_count;

  std::vector<Matrix> gamma(items, Matrix(J, K));
  for (int i = 0; i < items; ++i) {
    std::vector<double> votes(K, 0.0);
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
      for (int b = 0; b < K; ++b) {
        votes[b] += counts.solver_counts[t][i][b];
        total += counts.solver_counts[t][i][b];
      }
    }
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < K; ++b) {
        const double q = total > 0.0 ? votes[b] / total : 1.0 / K;
        gamma[i].at(a, b) = q / J;
      }
    }
  }
  JointParams params = joint_m_step(counts, J, gamma, options.smoothing);

  EmResult res;
  double prev_ll = 0.0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    EStepOut e = joint_e_step(counts, J, params);
    gamma = std::move(e.gamma);

    // Same plateau rule as the classic fit: the smoothing pseudo-counts may
    // push a converged model downhill, and that step is not an iteration.
    if (iter >= 2 && e.ll < prev_ll) {
      res.converged = true;
      break;
    }

    res.log_likelihood_trace.push_back(e.ll);
    res.iterations = iter;
    params = joint_m_step(counts, J, gamma, options.smoothing);
    if (on_iteration) on_iteration(iter, joint_to_model(counts, params), e.ll);

    if (iter >= 2 && relative_step_below(e.ll, prev_ll, options.tol)) {
      res.converged = true;
      break;
    }
    prev_ll = e.ll;
  }

  res.model = joint_to_model(counts, params);
  res.model.validate(kStochasticTol);
  res.responsibilities.gamma = std::move(gamma);
  res.responsibilities.validate();
  return res;
}

PosteriorResult joint_posterior(const VoteCounts& counts,
                                const ConfusionModel& model) {
  check_counts_for_fit(counts);
  model.validate();
  if (model.class_count() != counts.class_count) {
    throw DimensionMismatch("model classes do not match the counts");
  }
  if (static_cast<int>(model.solver_confusion.size()) != counts.solver_count) {
    throw DimensionMismatch("model solver count does not match the counts");
  }
  if (counts.reflector_count > 0 &&
      static_cast<int>(model.reflector_confusion.size()) !=
          counts.reflector_count) {
    throw DimensionMismatch("model reflector count does not match the counts");
  }

  JointParams params;
  params.zeta_beta = model.answer_prior;
  params.zeta_alpha = model.weight_prior.empty()
                          ? std::vector<double>{1.0}
                          : model.weight_prior;
  params.solver = model.solver_confusion;
  params.reflector = model.reflector_confusion;
  const int J = static_cast<int>(params.zeta_alpha.size());

  EStepOut e = joint_e_step(counts, J, params);
  PosteriorResult out;
  out.responsibilities.gamma = std::move(e.gamma);
  out.responsibilities.validate();
  out.log_likelihood = e.ll;
  return out;
}

}  // namespace wise::aggregate
