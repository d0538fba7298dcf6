#include "clintime/stringsim.hpp"

#include <algorithm>
#include <cmath>

#include "clintime/text.hpp"

namespace clintime::strsim {

double jaro(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  const auto la = static_cast<std::ptrdiff_t>(a.size());
  const auto lb = static_cast<std::ptrdiff_t>(b.size());
  const std::ptrdiff_t window = std::max<std::ptrdiff_t>(std::max(la, lb) / 2 - 1, 0);

  std::vector<bool> am(la, false), bm(lb, false);
  std::ptrdiff_t matches = 0;
  for (std::ptrdiff_t i = 0; i < la; ++i) {
    const auto lo = std::max<std::ptrdiff_t>(0, i - window);
    const auto hi = std::min(lb - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (!bm[j] && a[i] == b[j]) {
        am[i] = bm[j] = true;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;

  std::ptrdiff_t transpositions = 0;
  std::ptrdiff_t k = 0;
  for (std::ptrdiff_t i = 0; i < la; ++i) {
    if (!am[i]) continue;
    while (!bm[k]) ++k;
    if (a[i] != b[k]) ++transpositions;
    ++k;
  }
  const double m = static_cast<double>(matches);
  return (m / la + m / lb + (m - transpositions / 2.0) / m) / 3.0;
}

double jaro_winkler(const std::string& a, const std::string& b) {
  double j = jaro(a, b);
  std::size_t prefix = 0;
  const std::size_t lim = std::min({a.size(), b.size(), std::size_t(4)});
  while (prefix < lim && a[prefix] == b[prefix]) ++prefix;
  return j + prefix * 0.1 * (1.0 - j);
}

namespace {

std::vector<std::string> tfidf_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text::to_lower(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// L2-normalized log-TF * log-IDF weights over the string's unique tokens.
std::map<std::string, double> weight_vector(const std::string& s, const TfidfCorpusStats& stats) {
  std::map<std::string, int> tf;
  for (const auto& t : tfidf_tokens(s)) ++tf[t];
  std::map<std::string, double> v;
  double norm = 0;
  for (const auto& [tok, count] : tf) {
    auto it = stats.tokenDocFreq.find(tok);
    int df = it != stats.tokenDocFreq.end() ? it->second : 1;  // unseen tokens as df=1
    double w = (std::log(static_cast<double>(count)) + 1.0) *
               std::log(static_cast<double>(stats.docCount) / df);
    if (w <= 0) w = 1e-12;  // df == docCount; keep the token with a tiny weight
    v[tok] = w;
    norm += w * w;
  }
  norm = std::sqrt(norm);
  if (norm > 0)
    for (auto& [tok, w] : v) w /= norm;
  return v;
}

double directed_soft_tfidf(const std::map<std::string, double>& vs,
                           const std::map<std::string, double>& vt,
                           const SoftTfidfParams& params) {
  double score = 0;
  for (const auto& [w, ws] : vs) {
    double bestSim = 0;
    double bestWt = 0;
    for (const auto& [u, wt] : vt) {
      double sim = jaro_winkler(w, u);
      if (sim >= params.innerThreshold && sim > bestSim) {
        bestSim = sim;
        bestWt = wt;
      }
    }
    if (bestSim > 0) score += ws * bestWt * bestSim;
  }
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace

TfidfCorpusStats build_stats(const std::vector<std::string>& strings) {
  if (strings.empty()) throw EmptyCorpus();
  TfidfCorpusStats stats;
  stats.docCount = static_cast<int>(strings.size());
  for (const auto& s : strings) {
    std::vector<std::string> toks = tfidf_tokens(s);
    std::sort(toks.begin(), toks.end());
    toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
    for (const auto& t : toks) ++stats.tokenDocFreq[t];
  }
  return stats;
}

double soft_tfidf(const std::string& s, const std::string& t, const TfidfCorpusStats& stats,
                  const SoftTfidfParams& params) {
  auto vs = weight_vector(s, stats);
  auto vt = weight_vector(t, stats);
  if (vs.empty() || vt.empty()) return vs.empty() && vt.empty() ? 1.0 : 0.0;
  double st = directed_soft_tfidf(vs, vt, params);
  double ts = directed_soft_tfidf(vt, vs, params);
  return (st + ts) / 2.0;
}

}  // namespace clintime::strsim
