#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>

#include "clintime/crf.hpp"
#include "clintime/text.hpp"

namespace clintime::crf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}
}  // namespace

Objective::Objective(const std::vector<TrainingSentence>& data,
                     const std::vector<FeatureTemplate>& templates, const LabelSchema& schema,
                     double c)
    : c_(c) {
  if (data.empty()) throw std::runtime_error("empty training set");
  if (c <= 0) throw std::runtime_error("hyperparameter c must be positive");
  labels_ = schema.labels();  // lexicographically sorted by construction
  nLabels_ = labels_.size();

  auto labelId = [&](const std::string& l) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
    if (it == labels_.end() || *it != l) throw InvalidGoldLabel(l);
    return static_cast<int>(it - labels_.begin());
  };

  for (const auto& s : data) {
    if (s.x.size() != s.y.size()) throw std::runtime_error("sentence/label length mismatch");
    if (!schema.valid_sequence(s.y)) throw InvalidGoldLabel("sequence violates schema");
    CompiledSentence cs;
    auto feats = expand_features(s.x, templates);
    cs.features.resize(feats.size());
    for (std::size_t t = 0; t < feats.size(); ++t) {
      for (auto& f : feats[t]) {
        auto [it, inserted] = featureIndex_.try_emplace(std::move(f), 0);
        if (inserted) it->second = static_cast<int>(featureIndex_.size()) - 1;
        cs.features[t].push_back(it->second);
      }
      cs.gold.push_back(labelId(s.y[t]));
    }
    sentences_.push_back(std::move(cs));
  }
  nFeatures_ = featureIndex_.size();
  nWeights_ = nFeatures_ * nLabels_ + nLabels_ * nLabels_;
}

double Objective::sentence_ll(const CompiledSentence& s, const std::vector<double>& w,
                              std::vector<double>* grad) const {
  const std::size_t n = s.features.size();
  if (n == 0) return 0;
  const std::size_t L = nLabels_;
  const std::size_t transBase = nFeatures_ * L;

  // state scores
  std::vector<std::vector<double>> state(n, std::vector<double>(L, 0.0));
  for (std::size_t t = 0; t < n; ++t)
    for (int f : s.features[t])
      for (std::size_t y = 0; y < L; ++y) state[t][y] += w[f * L + y];

  // forward
  std::vector<std::vector<double>> alpha(n, std::vector<double>(L));
  alpha[0] = state[0];
  std::vector<double> acc(L);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p) acc[p] = alpha[t - 1][p] + w[transBase + p * L + y];
      alpha[t][y] = logsumexp(acc) + state[t][y];
    }
  }
  double logZ = logsumexp(alpha[n - 1]);

  double pathScore = 0;
  for (std::size_t t = 0; t < n; ++t) {
    pathScore += state[t][s.gold[t]];
    if (t) pathScore += w[transBase + s.gold[t - 1] * L + s.gold[t]];
  }
  double ll = pathScore - logZ;

  if (grad) {
    // backward
    std::vector<std::vector<double>> beta(n, std::vector<double>(L, 0.0));
    for (std::size_t t = n - 1; t-- > 0;) {
      for (std::size_t y = 0; y < L; ++y) {
        for (std::size_t q = 0; q < L; ++q)
          acc[q] = w[transBase + y * L + q] + state[t + 1][q] + beta[t + 1][q];
        beta[t][y] = logsumexp(acc);
      }
    }
    // empirical minus expected state counts
    std::vector<double> marg(L);
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t y = 0; y < L; ++y)
        marg[y] = std::exp(alpha[t][y] + beta[t][y] - logZ);
      for (int f : s.features[t]) {
        (*grad)[f * L + s.gold[t]] += 1.0;
        for (std::size_t y = 0; y < L; ++y) (*grad)[f * L + y] -= marg[y];
      }
    }
    // transitions
    for (std::size_t t = 1; t < n; ++t) {
      (*grad)[transBase + s.gold[t - 1] * L + s.gold[t]] += 1.0;
      for (std::size_t p = 0; p < L; ++p)
        for (std::size_t y = 0; y < L; ++y) {
          double e = std::exp(alpha[t - 1][p] + w[transBase + p * L + y] + state[t][y] +
                              beta[t][y] - logZ);
          (*grad)[transBase + p * L + y] -= e;
        }
    }
  }
  return ll;
}

double Objective::evaluate(const std::vector<double>& w, std::vector<double>* grad) const {
  if (w.size() != nWeights_) throw std::runtime_error("weight dimension mismatch");
  if (grad) {
    grad->assign(nWeights_, 0.0);
  }
  double ll = 0;
  for (const auto& s : sentences_) ll += sentence_ll(s, w, grad);
  double penalty = 0;
  for (double x : w) penalty += x * x;
  ll -= penalty / (2.0 * c_);
  if (grad)
    for (std::size_t i = 0; i < nWeights_; ++i) (*grad)[i] -= w[i] / c_;
  if (!std::isfinite(ll)) throw NonFiniteObjective();
  return ll;
}

namespace {

// L-BFGS (two-loop recursion, fixed history) in minimization form on the
// negated objective, with backtracking Armijo line search.
std::vector<double> lbfgs_maximize(const Objective& obj, const Hyper& hyper) {
  const std::size_t dim = obj.dimension();
  auto eval = [&](const std::vector<double>& w, std::vector<double>& grad) {
    double f = -obj.evaluate(w, &grad);
    for (auto& v : grad) v = -v;
    return f;
  };

  std::vector<double> w(dim, 0.0), g(dim), gNew(dim), wNew(dim);
  double f = eval(w, g);

  std::deque<std::vector<double>> sHist, yHist;
  std::deque<double> rhoHist;

  for (int iter = 0; iter < hyper.maxIterations; ++iter) {
    std::vector<double> q = g;
    std::vector<double> alphas(sHist.size());
    for (std::size_t i = sHist.size(); i-- > 0;) {
      double a = rhoHist[i] * std::inner_product(sHist[i].begin(), sHist[i].end(), q.begin(), 0.0);
      alphas[i] = a;
      for (std::size_t k = 0; k < dim; ++k) q[k] -= a * yHist[i][k];
    }
    if (!sHist.empty()) {
      double sy = 1.0 / rhoHist.back();
      double yy = std::inner_product(yHist.back().begin(), yHist.back().end(),
                                     yHist.back().begin(), 0.0);
      if (yy > 0)
        for (auto& v : q) v *= sy / yy;
    }
    for (std::size_t i = 0; i < sHist.size(); ++i) {
      double b = rhoHist[i] * std::inner_product(yHist[i].begin(), yHist[i].end(), q.begin(), 0.0);
      for (std::size_t k = 0; k < dim; ++k) q[k] += sHist[i][k] * (alphas[i] - b);
    }
    // descent direction d = -q
    double dirDeriv = -std::inner_product(g.begin(), g.end(), q.begin(), 0.0);
    if (dirDeriv >= 0) {
      q = g;  // fall back to steepest descent
      dirDeriv = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      if (dirDeriv == 0) break;
    }

    double step = 1.0;
    double fNew = f;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t k = 0; k < dim; ++k) wNew[k] = w[k] - step * q[k];
      fNew = eval(wNew, gNew);
      if (fNew <= f + 1e-4 * step * dirDeriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> sVec(dim), yVec(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      sVec[k] = wNew[k] - w[k];
      yVec[k] = gNew[k] - g[k];
    }
    double sy = std::inner_product(sVec.begin(), sVec.end(), yVec.begin(), 0.0);
    if (sy > 1e-12) {
      sHist.push_back(std::move(sVec));
      yHist.push_back(std::move(yVec));
      rhoHist.push_back(1.0 / sy);
      if (static_cast<int>(sHist.size()) > hyper.lbfgsHistory) {
        sHist.pop_front();
        yHist.pop_front();
        rhoHist.pop_front();
      }
    }

    double rel = std::fabs(fNew - f) / std::max(1.0, std::fabs(fNew));
    w = wNew;
    g = gNew;
    f = fNew;
    if (rel < hyper.eta) break;
  }
  return w;
}

std::vector<double> sgd_maximize(const Objective& obj, const Hyper& hyper) {
  // Deterministic full-batch gradient ascent with decaying step; fallback
  // path behind the --sgd flag.
  const std::size_t dim = obj.dimension();
  std::vector<double> w(dim, 0.0), g(dim);
  double prev = obj.evaluate(w, &g);
  for (int epoch = 0; epoch < hyper.sgdEpochs; ++epoch) {
    double lr = hyper.sgdLearningRate / (1.0 + 0.1 * epoch);
    for (std::size_t k = 0; k < dim; ++k) w[k] += lr * g[k];
    double f = obj.evaluate(w, &g);
    if (std::fabs(f - prev) / std::max(1.0, std::fabs(f)) < hyper.eta) break;
    prev = f;
  }
  return w;
}

}  // namespace

CrfModel train(const std::vector<TrainingSentence>& data, const LabelSchema& schema,
               const std::vector<FeatureTemplate>& templates, const Hyper& hyper) {
  Objective obj(data, templates, schema, hyper.c);
  std::vector<double> w = hyper.useSgd ? sgd_maximize(obj, hyper) : lbfgs_maximize(obj, hyper);
  return CrfModel(obj.labels(), obj.feature_index(), std::move(w), templates, schema, hyper);
}

std::vector<TrainingSentence> read_training(std::istream& in) {
  std::vector<TrainingSentence> out;
  TrainingSentence cur;
  std::string line;
  auto flush = [&]() {
    if (!cur.y.empty()) {
      out.push_back(std::move(cur));
      cur = TrainingSentence{};
    }
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    auto f = text::split(line, '\t');
    if (f.size() < 2) throw std::runtime_error("training line needs at least 2 columns");
    std::vector<std::string> row;
    row.push_back(std::to_string(cur.y.size()));  // column 0: position
    for (std::size_t i = 0; i + 1 < f.size(); ++i) row.push_back(f[i]);
    cur.x.rows.push_back(std::move(row));
    cur.y.push_back(f.back());
  }
  flush();
  return out;
}

}  // namespace clintime::crf
