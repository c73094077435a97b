#include "hopeal/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "hopeal/error.hpp"

namespace hopeal {
namespace {

void check_probability(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw InputError("probability " + std::to_string(p) + " outside [0, 1]");
  }
}

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ProbDist ProbDist::from_hope(double p_hope) {
  check_probability(p_hope);
  ProbDist d;
  d.probs_ = {1.0 - p_hope, p_hope};
  return d;
}

ProbDist ProbDist::from_pair(double p_not_hope, double p_hope) {
  check_probability(p_not_hope);
  check_probability(p_hope);
  const double sum = p_not_hope + p_hope;
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InputError("probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  ProbDist d;
  d.probs_ = sum == 1.0 ? std::array<double, 2>{p_not_hope, p_hope}
                        : std::array<double, 2>{p_not_hope / sum, p_hope / sum};
  return d;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Label decide(const ProbDist& p) { return p.hope() > p.not_hope() ? Label::Hope : Label::NotHope; }

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be a finite value >= 0");
  if (max_iters < 1) throw InputError("max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw InputError("grad_tol must be > 0");
}

nlohmann::ordered_json LinearModel::to_json() const {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["weights"] = weights;
  j["bias"] = bias;
  j["lambda"] = lambda;
  j["vectorizer_fingerprint"] = vectorizer_fingerprint;
  return j;
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) throw InputError("model: unsupported format_version " + std::to_string(version));
    LinearModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.lambda = j.at("lambda").get<double>();
    m.vectorizer_fingerprint = j.at("vectorizer_fingerprint").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model: malformed JSON: ") + e.what());
  }
}

LogisticObjective::LogisticObjective(std::span<const SparseVector> xs, std::span<const Label> ys, double lambda)
    : xs_(xs), lambda_(lambda) {
  if (xs.empty()) throw InputError("training set is empty");
  if (xs.size() != ys.size()) {
    throw InputError("got " + std::to_string(xs.size()) + " feature vectors but " + std::to_string(ys.size()) +
                     " labels");
  }
  dim_ = xs.front().dim();
  signs_.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dim() != dim_) {
      throw InputError("feature vector " + std::to_string(i) + " has dimension " + std::to_string(xs[i].dim()) +
                       ", expected " + std::to_string(dim_));
    }
    if (!xs[i].all_finite()) throw InputError("feature vector " + std::to_string(i) + " has a non-finite value");
    signs_.push_back(ys[i] == Label::Hope ? 1.0 : -1.0);
  }
}

double LogisticObjective::value(std::span<const double> params) const {
  const auto w = params.first(dim_);
  const double b = params[dim_];
  double loss = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) loss += softplus(-signs_[i] * (xs_[i].dot(w) + b));
  return loss / static_cast<double>(xs_.size()) + 0.5 * lambda_ * dot(w, w);
}

double LogisticObjective::value_and_gradient(std::span<const double> params, std::span<double> grad) const {
  const auto w = params.first(dim_);
  const double b = params[dim_];
  const double inv_n = 1.0 / static_cast<double>(xs_.size());
  std::fill(grad.begin(), grad.end(), 0.0);

  double loss = 0.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    const double margin = signs_[i] * (xs_[i].dot(w) + b);
    loss += softplus(-margin);
    // d/dz log(1 + exp(-s z)) = -s sigmoid(-s z)
    const double coef = -signs_[i] * sigmoid(-margin) * inv_n;
    for (const auto& e : xs_[i]) grad[e.index] += coef * e.weight;
    grad[dim_] += coef;
  }
  for (std::size_t j = 0; j < dim_; ++j) grad[j] += lambda_ * w[j];
  return loss * inv_n + 0.5 * lambda_ * dot(w, w);
}

TrainResult train_detailed(std::span<const SparseVector> xs, std::span<const Label> ys, const TrainConfig& cfg) {
  cfg.validate();
  const LogisticObjective objective(xs, ys, cfg.lambda);
  const bool has_hope = std::find(ys.begin(), ys.end(), Label::Hope) != ys.end();
  const bool has_not_hope = std::find(ys.begin(), ys.end(), Label::NotHope) != ys.end();
  if (!has_hope || !has_not_hope) throw InputError("training data contains a single class");

  constexpr std::size_t kHistory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxBacktracks = 60;

  const std::size_t n_params = objective.dimension() + 1;
  std::vector<double> x(n_params, 0.0), g(n_params), x_new(n_params), g_new(n_params), dir(n_params);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  TrainResult result;
  double f = objective.value_and_gradient(x, g);
  result.objective_trace.push_back(f);

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (inf_norm(g) <= cfg.grad_tol) {
      result.converged = true;
      break;
    }

    // Two-loop recursion: dir = -H g.
    for (std::size_t j = 0; j < n_params; ++j) dir[j] = -g[j];
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (std::size_t j = 0; j < n_params; ++j) dir[j] -= alpha[k] * y_hist[k][j];
    }
    if (!s_hist.empty()) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], dir);
      for (std::size_t j = 0; j < n_params; ++j) dir[j] += (alpha[k] - beta) * s_hist[k][j];
    }

    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n_params; ++j) dir[j] = -g[j];
      slope = dot(g, dir);
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      for (std::size_t j = 0; j < n_params; ++j) x_new[j] = x[j] + step * dir[j];
      f_new = objective.value_and_gradient(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || !(f_new < f)) break;  // no further progress at double precision

    std::vector<double> s(n_params), y(n_params);
    for (std::size_t j = 0; j < n_params; ++j) {
      s[j] = x_new[j] - x[j];
      y[j] = g_new[j] - g[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (s_hist.size() == kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    result.objective_trace.push_back(f);
  }
  if (!result.converged && inf_norm(g) <= cfg.grad_tol) result.converged = true;

  result.iterations = iter;
  result.grad_inf_norm = inf_norm(g);
  result.model.weights.assign(x.begin(), x.end() - 1);
  result.model.bias = x.back();
  result.model.lambda = cfg.lambda;
  return result;
}

LinearModel train(std::span<const SparseVector> xs, std::span<const Label> ys, const TrainConfig& cfg) {
  return train_detailed(xs, ys, cfg).model;
}

ProbDist predict_proba(const LinearModel& m, const SparseVector& x) {
  if (x.dim() != m.dimension()) {
    throw InputError("feature dimension " + std::to_string(x.dim()) + " does not match model dimension " +
                     std::to_string(m.dimension()));
  }
  return ProbDist::from_hope(sigmoid(x.dot(m.weights) + m.bias));
}

Label predict(const LinearModel& m, const SparseVector& x) { return decide(predict_proba(m, x)); }

std::vector<ProbDist> LogisticScorer::score_batch(std::span<const Document> docs) {
  std::vector<ProbDist> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(predict_proba(model_, featurizer_(d)));
  return out;
}

std::vector<ProbDist> TableScorer::score_batch(std::span<const Document> docs) {
  std::vector<ProbDist> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    const auto it = table_.find(d.raw_text);
    if (it == table_.end()) throw InputError("no probabilities for text of document '" + d.id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace hopeal
