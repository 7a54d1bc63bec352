#pragma once

// Issue-text normalization and story-point sizing with a multinomial
// Naive Bayes classifier.

#include <array>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rulcast::nlp {

using TokenList = std::vector<std::string>;

class StopWords {
 public:
  /// The bundled English function-word list.
  StopWords();
  explicit StopWords(std::set<std::string> words) : words_(std::move(words)) {}
  /// One word per line; '#' starts a comment.
  static StopWords load(std::istream& in);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::set<std::string> words_;
};

/// lowercase -> punctuation to spaces -> whitespace split -> stop-word
/// removal -> suffix stripping (-ing, -ed, -es, -s; stem >= 3) to a fixpoint
/// -> stop-word removal of the stems.
TokenList normalize(std::string_view text, const StopWords& stop_words = StopWords());

/// One suffix-stripping pass result iterated until nothing changes.
std::string stem(std::string_view token);

struct LabeledDoc {
  TokenList tokens;
  int story_points = 1;
};

/// Immutable trained model. Token likelihoods are Lidstone-smoothed:
/// P(t|c) = (count(t,c) + alpha) / (total(c) + alpha * |V|).
class SizingModel {
 public:
  SizingModel(double alpha, std::vector<int> classes, std::vector<std::size_t> doc_counts,
              std::vector<std::size_t> token_totals, std::map<std::string, std::vector<std::size_t>> counts);

  double alpha() const noexcept { return alpha_; }
  /// Story-point classes seen in training, ascending.
  const std::vector<int>& classes() const noexcept { return classes_; }
  const std::vector<std::size_t>& doc_counts() const noexcept { return doc_counts_; }
  const std::vector<std::size_t>& token_totals() const noexcept { return token_totals_; }
  const std::map<std::string, std::vector<std::size_t>>& counts() const noexcept { return counts_; }
  std::size_t vocabulary_size() const noexcept { return counts_.size(); }

  double prior(std::size_t class_index) const;
  /// Smoothed P(token | class); out-of-vocabulary tokens get alpha / (total + alpha|V|).
  double likelihood(std::string_view token, std::size_t class_index) const;

  void save(std::ostream& out) const;
  static SizingModel load(std::istream& in);

 private:
  double alpha_;
  std::vector<int> classes_;
  std::vector<std::size_t> doc_counts_;
  std::vector<std::size_t> token_totals_;
  std::map<std::string, std::vector<std::size_t>> counts_;
};

SizingModel train_sizer(const std::vector<LabeledDoc>& corpus, double alpha = 1.0);

/// (class, probability) pairs in ascending class order; sums to 1.
using Posterior = std::vector<std::pair<int, double>>;

Posterior posterior(const SizingModel& model, const TokenList& doc);
/// Argmax of the posterior; ties go to the smallest story-point class.
int classify_sp(const SizingModel& model, const TokenList& doc);
/// Argmax over arbitrary per-class scores with the same tie-break.
int argmax_class(const std::vector<int>& classes, const std::vector<double>& scores);

struct ConfusionMatrix {
  // rows: actual class, columns: predicted class, both over 1,2,3,5,8
  std::array<std::array<std::size_t, 5>, 5> counts{};

  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;
};

std::size_t class_slot(int story_points);

ConfusionMatrix evaluate(const SizingModel& model, const std::vector<LabeledDoc>& test_set);

struct TextSample {
  std::string text;
  int story_points = 1;
};

/// CSV with columns text,story_points.
std::vector<TextSample> load_training_corpus(std::istream& in);
std::vector<LabeledDoc> tokenize_corpus(const std::vector<TextSample>& samples, const StopWords& stop_words);

}  // namespace rulcast::nlp
