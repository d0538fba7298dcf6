#include <random>

#include <benchmark/benchmark.h>

#include "clintime/crf.hpp"
#include "clintime/stringsim.hpp"
#include "clintime/tlink.hpp"

using namespace clintime;

namespace {

crf::CrfModel make_model(std::size_t nFeatures, crf::SchemaKind kind) {
  crf::LabelSchema schema{kind, "X"};
  std::map<std::string, int> fi;
  for (std::size_t i = 0; i < nFeatures; ++i) fi["U00:w" + std::to_string(i)] = static_cast<int>(i);
  const std::size_t L = schema.labels().size();
  std::vector<double> w(nFeatures * L + L * L);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist(0.0, 0.5);
  for (double& x : w) x = dist(rng);
  auto templates = crf::parse_templates({"U00:%x[0,1]"});
  return crf::CrfModel({schema.labels()}, std::move(fi), std::move(w), std::move(templates),
                       schema, crf::Hyper{});
}

void BM_ViterbiDecode(benchmark::State& state) {
  crf::CrfModel model = make_model(64, crf::SchemaKind::BIO);
  crf::FeatureMatrix m;
  std::mt19937 rng(11);
  for (int t = 0; t < 30; ++t)
    m.rows.push_back({std::to_string(t), "w" + std::to_string(rng() % 64)});
  for (auto _ : state) benchmark::DoNotOptimize(model.decode(m));
}
BENCHMARK(BM_ViterbiDecode);

void BM_TransitiveClosure(benchmark::State& state) {
  tlink::TemporalGraph g;
  std::mt19937 rng(13);
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i + 1 < n; ++i)
    g.add("N" + std::to_string(i), "N" + std::to_string(i + 1),
          rng() % 2 ? Relation::Before : Relation::Overlap);
  for (auto _ : state) benchmark::DoNotOptimize(tlink::transitive_closure(g));
}
BENCHMARK(BM_TransitiveClosure)->Arg(8)->Arg(16)->Arg(32);

void BM_SoftTfidf(benchmark::State& state) {
  std::vector<std::string> corpus = {"severe stomach ache", "stomach ache", "chest pain",
                                     "acute chest pain",    "mild headache", "headache"};
  auto stats = strsim::build_stats(corpus);
  for (auto _ : state)
    benchmark::DoNotOptimize(strsim::soft_tfidf("severe stomach ache", "stomach ache", stats));
}
BENCHMARK(BM_SoftTfidf);

}  // namespace
