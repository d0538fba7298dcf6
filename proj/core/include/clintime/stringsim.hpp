#ifndef CLINTIME_STRINGSIM_HPP
#define CLINTIME_STRINGSIM_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace clintime::strsim {

// Jaro similarity with Winkler prefix boost (prefix <= 4, scale 0.1).
double jaro(const std::string& a, const std::string& b);
double jaro_winkler(const std::string& a, const std::string& b);

struct EmptyCorpus : std::runtime_error {
  EmptyCorpus() : std::runtime_error("TF-IDF corpus is empty") {}
};

// Each input string is one pseudo-document; tokens lowercased.
struct TfidfCorpusStats {
  int docCount = 0;
  std::map<std::string, int> tokenDocFreq;
};

TfidfCorpusStats build_stats(const std::vector<std::string>& strings);

struct SoftTfidfParams {
  double innerThreshold = 0.9;  // Jaro-Winkler close-partner cutoff
};

// Cohen et al. SoftTFIDF with log-TF * log-IDF weights, L2-normalized per
// string, symmetrized by averaging the two directed scores.
double soft_tfidf(const std::string& s, const std::string& t, const TfidfCorpusStats& stats,
                  const SoftTfidfParams& params = {});

}  // namespace clintime::strsim

#endif
