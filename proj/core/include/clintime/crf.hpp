#ifndef CLINTIME_CRF_HPP
#define CLINTIME_CRF_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clintime::crf {

struct TemplateSyntaxError : std::runtime_error {
  int line, col;
  TemplateSyntaxError(int ln, int c, const std::string& what)
      : std::runtime_error("template syntax error at " + std::to_string(ln) + ":" +
                           std::to_string(c) + ": " + what),
        line(ln),
        col(c) {}
};

struct ColumnOutOfRange : std::runtime_error {
  ColumnOutOfRange(const std::string& tpl, int column)
      : std::runtime_error("template " + tpl + " references missing column " +
                           std::to_string(column)) {}
};

struct TemplateCell {
  int rowOffset = 0;   // within [-4, 4]
  int columnIndex = 0;
};

// CRF++-style unigram template, e.g. "U07:%x[0,2]" or
// "U18:%x[0,1]/%x[0,2]/%x[0,4]".
struct FeatureTemplate {
  std::string id;
  std::vector<TemplateCell> cells;
  std::string source;  // original text form
};

FeatureTemplate parse_template_line(const std::string& line, int lineNo = 1);
// Parses a template file body: one template per line, '#' comments, blank
// lines and a bare "B" line (transitions are always modeled) are skipped.
std::vector<FeatureTemplate> parse_templates(const std::string& body);
std::vector<FeatureTemplate> load_templates(const std::string& path);

// Per-sentence feature grid: rows = tokens, columns = attribute strings
// (column 0 = position). Out-of-range row offsets resolve to the boundary
// sentinels "_B-1", "_B-2", "_B+1", "_B+2", ...
struct FeatureMatrix {
  std::vector<std::vector<std::string>> rows;

  std::size_t size() const { return rows.size(); }
  std::size_t columns() const { return rows.empty() ? 0 : rows[0].size(); }
};

std::string cell_value(const FeatureMatrix& m, int row, const TemplateCell& cell,
                       const std::string& templateId);
// feature string = templateId + ":" + cell values joined by '/'
std::vector<std::vector<std::string>> expand_features(
    const FeatureMatrix& m, const std::vector<FeatureTemplate>& templates);

// ---- Label schemas ----

enum class SchemaKind { IO, BIO, WBIO };
SchemaKind schema_kind_from(const std::string& s);
std::string to_string(SchemaKind k);

struct OverlappingMentions : std::runtime_error {
  OverlappingMentions() : std::runtime_error("overlapping mentions cannot be encoded") {}
};

struct LabelSchema {
  SchemaKind kind = SchemaKind::BIO;
  std::string entityLabel;  // informational; labels themselves are plain

  std::vector<std::string> labels() const;  // lexicographically sorted
  bool valid_start(const std::string& l) const;
  bool valid_transition(const std::string& from, const std::string& to) const;
  bool valid_end(const std::string& l) const;
  bool valid_sequence(const std::vector<std::string>& seq) const;
};

// Mentions as [first, end) token-index ranges.
using TokenRange = std::pair<std::size_t, std::size_t>;
std::vector<std::string> encode_labels(std::vector<TokenRange> mentions, std::size_t nTokens,
                                       const LabelSchema& schema);
std::vector<TokenRange> decode_labels(const std::vector<std::string>& seq,
                                      const LabelSchema& schema);

// ---- Model ----

struct Hyper {
  double c = 1.0;      // inverse L2 penalty: objective = LL - ||w||^2 / (2c)
  double eta = 1e-4;   // relative objective-change convergence threshold
  int maxIterations = 300;
  bool useSgd = false; // batch L-BFGS by default
  int lbfgsHistory = 10;
  double sgdLearningRate = 0.1;
  int sgdEpochs = 50;
};

struct NonFiniteObjective : std::runtime_error {
  NonFiniteObjective() : std::runtime_error("objective became non-finite (scaling bug)") {}
};
struct InvalidGoldLabel : std::runtime_error {
  explicit InvalidGoldLabel(const std::string& l)
      : std::runtime_error("gold label '" + l + "' not valid under schema") {}
};

class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(std::vector<std::string> labels, std::map<std::string, int> featureIndex,
           std::vector<double> weights, std::vector<FeatureTemplate> templates,
           LabelSchema schema, Hyper hyper);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, int>& feature_index() const { return featureIndex_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<FeatureTemplate>& templates() const { return templates_; }
  const LabelSchema& schema() const { return schema_; }
  const Hyper& hyper() const { return hyper_; }

  // Schema-invalid transitions get -inf when hard-constrained mode is on.
  bool hard_constrained() const { return hardConstrained_; }
  void set_hard_constrained(bool v) { hardConstrained_ = v; }

  // Viterbi; deterministic tie-break by lexicographic label order.
  std::vector<std::string> decode(const FeatureMatrix& m) const;
  // Exact sequence probability (for the enumeration oracle and tests).
  double sequence_log_prob(const FeatureMatrix& m, const std::vector<std::string>& y) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static CrfModel load(std::istream& in);
  static CrfModel load_file(const std::string& path);

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> featureIndex_;
  std::vector<double> weights_;  // |featureIndex| * L state weights + L*L transitions
  std::vector<FeatureTemplate> templates_;
  LabelSchema schema_;
  Hyper hyper_;
  bool hardConstrained_ = true;
};

struct TrainingSentence {
  FeatureMatrix x;
  std::vector<std::string> y;
};

// L2-penalized conditional log-likelihood and its gradient; exposed so the
// finite-difference oracle can probe arbitrary weight vectors.
class Objective {
 public:
  Objective(const std::vector<TrainingSentence>& data, const std::vector<FeatureTemplate>& templates,
            const LabelSchema& schema, double c);

  std::size_t dimension() const { return nWeights_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::map<std::string, int>& feature_index() const { return featureIndex_; }

  // Returns objective value (to maximize); fills gradient if non-null.
  double evaluate(const std::vector<double>& w, std::vector<double>* grad) const;

 private:
  struct CompiledSentence {
    std::vector<std::vector<int>> features;  // per token: active feature ids
    std::vector<int> gold;                   // label ids
  };
  std::vector<CompiledSentence> sentences_;
  std::vector<std::string> labels_;
  std::map<std::string, int> featureIndex_;
  std::size_t nFeatures_ = 0, nLabels_ = 0, nWeights_ = 0;
  double c_ = 1.0;

  double sentence_ll(const CompiledSentence& s, const std::vector<double>& w,
                     std::vector<double>* grad) const;
};

CrfModel train(const std::vector<TrainingSentence>& data, const LabelSchema& schema,
               const std::vector<FeatureTemplate>& templates, const Hyper& hyper);

// Tab-separated token-per-line columns, blank line between sentences; the
// last column is the gold label. Matrix column 0 is the token position.
std::vector<TrainingSentence> read_training(std::istream& in);

}  // namespace clintime::crf

#endif
