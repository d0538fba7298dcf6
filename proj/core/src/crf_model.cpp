#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "clintime/crf.hpp"

namespace clintime::crf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CrfModel::CrfModel(std::vector<std::string> labels, std::map<std::string, int> featureIndex,
                   std::vector<double> weights, std::vector<FeatureTemplate> templates,
                   LabelSchema schema, Hyper hyper)
    : labels_(std::move(labels)),
      featureIndex_(std::move(featureIndex)),
      weights_(std::move(weights)),
      templates_(std::move(templates)),
      schema_(std::move(schema)),
      hyper_(hyper) {
  const std::size_t L = labels_.size();
  if (weights_.size() != featureIndex_.size() * L + L * L)
    throw std::runtime_error("weight vector size does not match feature table");
}

std::vector<std::string> CrfModel::decode(const FeatureMatrix& m) const {
  const std::size_t n = m.size();
  if (n == 0) return {};
  const std::size_t L = labels_.size();
  const std::size_t transBase = featureIndex_.size() * L;
  auto feats = expand_features(m, templates_);

  auto stateScore = [&](std::size_t t, std::size_t y) {
    double s = 0;
    for (const auto& f : feats[t]) {
      auto it = featureIndex_.find(f);
      if (it != featureIndex_.end()) s += weights_[it->second * L + y];
    }
    return s;
  };

  std::vector<std::vector<double>> score(n, std::vector<double>(L, kNegInf));
  std::vector<std::vector<int>> back(n, std::vector<int>(L, -1));
  for (std::size_t y = 0; y < L; ++y) {
    if (hardConstrained_ && !schema_.valid_start(labels_[y])) continue;
    score[0][y] = stateScore(0, y);
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      double st = stateScore(t, y);
      double best = kNegInf;
      int arg = -1;
      for (std::size_t p = 0; p < L; ++p) {
        if (score[t - 1][p] == kNegInf) continue;
        if (hardConstrained_ && !schema_.valid_transition(labels_[p], labels_[y])) continue;
        double v = score[t - 1][p] + weights_[transBase + p * L + y];
        // labels_ is sorted, so strict '>' keeps the lexicographically
        // smallest predecessor on ties
        if (v > best) {
          best = v;
          arg = static_cast<int>(p);
        }
      }
      if (arg >= 0 || (n == 1)) {
        score[t][y] = best + st;
        back[t][y] = arg;
      }
    }
  }
  double best = kNegInf;
  int arg = -1;
  for (std::size_t y = 0; y < L; ++y) {
    if (score[n - 1][y] == kNegInf) continue;
    if (hardConstrained_ && !schema_.valid_end(labels_[y])) continue;
    if (score[n - 1][y] > best) {
      best = score[n - 1][y];
      arg = static_cast<int>(y);
    }
  }
  if (arg < 0) {
    // fully constrained out (degenerate); fall back to unconstrained best
    for (std::size_t y = 0; y < L; ++y)
      if (score[n - 1][y] > best) {
        best = score[n - 1][y];
        arg = static_cast<int>(y);
      }
    if (arg < 0) arg = 0;
  }
  std::vector<std::string> out(n);
  int cur = arg;
  for (std::size_t t = n; t-- > 0;) {
    out[t] = labels_[cur];
    cur = back[t][cur];
    if (cur < 0 && t > 0) cur = 0;
  }
  return out;
}

double CrfModel::sequence_log_prob(const FeatureMatrix& m, const std::vector<std::string>& y) const {
  const std::size_t n = m.size();
  if (y.size() != n) throw std::runtime_error("label sequence length mismatch");
  const std::size_t L = labels_.size();
  const std::size_t transBase = featureIndex_.size() * L;
  auto feats = expand_features(m, templates_);
  auto labelId = [&](const std::string& l) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
    if (it == labels_.end() || *it != l) throw InvalidGoldLabel(l);
    return static_cast<std::size_t>(it - labels_.begin());
  };
  auto stateScore = [&](std::size_t t, std::size_t lab) {
    double s = 0;
    for (const auto& f : feats[t]) {
      auto it = featureIndex_.find(f);
      if (it != featureIndex_.end()) s += weights_[it->second * L + lab];
    }
    return s;
  };

  double pathScore = 0;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t lab = labelId(y[t]);
    pathScore += stateScore(t, lab);
    if (t) pathScore += weights_[transBase + labelId(y[t - 1]) * L + lab];
  }

  // log Z by forward recursion in log space
  std::vector<double> alpha(L), next(L);
  for (std::size_t lab = 0; lab < L; ++lab) alpha[lab] = stateScore(0, lab);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t lab = 0; lab < L; ++lab) {
      double mx = kNegInf;
      for (std::size_t p = 0; p < L; ++p)
        mx = std::max(mx, alpha[p] + weights_[transBase + p * L + lab]);
      double sum = 0;
      for (std::size_t p = 0; p < L; ++p)
        sum += std::exp(alpha[p] + weights_[transBase + p * L + lab] - mx);
      next[lab] = mx + std::log(sum) + stateScore(t, lab);
    }
    alpha = next;
  }
  double mx = kNegInf;
  for (double a : alpha) mx = std::max(mx, a);
  double sum = 0;
  for (double a : alpha) sum += std::exp(a - mx);
  double logZ = mx + std::log(sum);
  return pathScore - logZ;
}

void CrfModel::save(std::ostream& out) const {
  nlohmann::json j;
  j["version"] = 1;
  j["labels"] = labels_;
  j["features"] = featureIndex_;
  j["weights"] = weights_;
  std::vector<std::string> tpl;
  for (const auto& t : templates_) tpl.push_back(t.source);
  j["templates"] = tpl;
  j["schema"] = {{"kind", to_string(schema_.kind)}, {"entity", schema_.entityLabel}};
  j["hyper"] = {{"c", hyper_.c}, {"eta", hyper_.eta}};
  j["hard_constrained"] = hardConstrained_;
  out << j.dump(1) << "\n";
}

void CrfModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model " + path);
  save(out);
}

CrfModel CrfModel::load(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unknown model version");
  LabelSchema schema;
  schema.kind = schema_kind_from(j.at("schema").at("kind").get<std::string>());
  schema.entityLabel = j.at("schema").at("entity").get<std::string>();
  Hyper hyper;
  hyper.c = j.at("hyper").at("c").get<double>();
  hyper.eta = j.at("hyper").at("eta").get<double>();
  std::vector<FeatureTemplate> templates;
  for (const auto& s : j.at("templates")) templates.push_back(parse_template_line(s.get<std::string>()));
  CrfModel m(j.at("labels").get<std::vector<std::string>>(),
             j.at("features").get<std::map<std::string, int>>(),
             j.at("weights").get<std::vector<double>>(), std::move(templates), schema, hyper);
  m.set_hard_constrained(j.value("hard_constrained", true));
  return m;
}

CrfModel CrfModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model " + path);
  return load(in);
}

}  // namespace clintime::crf
