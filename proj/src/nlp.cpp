#include "rulcast/nlp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rulcast/common.hpp"
#include "rulcast/error.hpp"

namespace rulcast::nlp {

namespace {

const char* const kBundledStopWords[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could",
    "did", "do", "does", "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has",
    "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if",
    "in", "into", "is", "it", "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor",
    "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which", "while", "who",
    "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself", "yourselves",
};

constexpr std::string_view kSuffixes[] = {"ing", "ed", "es", "s"};
constexpr std::size_t kMinStem = 3;

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

double log_sum_exp(const std::vector<double>& xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

}  // namespace

StopWords::StopWords() {
  for (const char* w : kBundledStopWords) words_.insert(w);
}

StopWords StopWords::load(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string word = to_lower(trim(line));
    if (!word.empty()) words.insert(word);
  }
  return StopWords(std::move(words));
}

std::string stem(std::string_view token) {
  std::string current(token);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::string_view suffix : kSuffixes) {
      if (ends_with(current, suffix) && current.size() - suffix.size() >= kMinStem) {
        current.resize(current.size() - suffix.size());
        changed = true;
        break;
      }
    }
  }
  return current;
}

TokenList normalize(std::string_view text, const StopWords& stop_words) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::ispunct(c))
      cleaned.push_back(' ');
    else
      cleaned.push_back(static_cast<char>(std::tolower(c)));
  }
  TokenList out;
  std::istringstream words(cleaned);
  std::string word;
  while (words >> word) {
    if (stop_words.contains(word)) continue;
    std::string stemmed = stem(word);
    if (stop_words.contains(stemmed)) continue;
    out.push_back(std::move(stemmed));
  }
  return out;
}

// ---------------------------------------------------------------------------

SizingModel::SizingModel(double alpha, std::vector<int> classes, std::vector<std::size_t> doc_counts,
                         std::vector<std::size_t> token_totals,
                         std::map<std::string, std::vector<std::size_t>> counts)
    : alpha_(alpha),
      classes_(std::move(classes)),
      doc_counts_(std::move(doc_counts)),
      token_totals_(std::move(token_totals)),
      counts_(std::move(counts)) {
  if (!(alpha_ > 0) || !std::isfinite(alpha_)) throw Error(Errc::parameter, "smoothing alpha must be > 0");
  if (classes_.empty()) throw Error(Errc::training, "model has no classes");
  if (doc_counts_.size() != classes_.size() || token_totals_.size() != classes_.size())
    throw Error(Errc::parse, "per-class arrays disagree with class count");
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    int c = classes_[i];
    if (c != 1 && c != 2 && c != 3 && c != 5 && c != 8)
      throw Error(Errc::parse, "story-point class " + std::to_string(c) + " outside 1,2,3,5,8");
    if (i > 0 && classes_[i - 1] >= c) throw Error(Errc::parse, "story-point classes must be ascending");
    if (doc_counts_[i] == 0) throw Error(Errc::parse, "class " + std::to_string(c) + " has no documents");
  }
  for (const auto& [token, per_class] : counts_)
    if (per_class.size() != classes_.size())
      throw Error(Errc::parse, "token '" + token + "' has wrong number of class counts");
}

double SizingModel::prior(std::size_t class_index) const {
  std::size_t docs = 0;
  for (std::size_t n : doc_counts_) docs += n;
  return static_cast<double>(doc_counts_.at(class_index)) / static_cast<double>(docs);
}

double SizingModel::likelihood(std::string_view token, std::size_t class_index) const {
  auto it = counts_.find(std::string(token));
  double count = it == counts_.end() ? 0.0 : static_cast<double>(it->second[class_index]);
  double denom = static_cast<double>(token_totals_[class_index]) + alpha_ * static_cast<double>(counts_.size());
  return (count + alpha_) / denom;
}

void SizingModel::save(std::ostream& out) const {
  char alpha[64];
  std::snprintf(alpha, sizeof alpha, "%.17g", alpha_);
  out << "rulcast-sizer 1\n";
  out << "alpha " << alpha << '\n';
  out << "classes " << classes_.size() << '\n';
  for (std::size_t i = 0; i < classes_.size(); ++i)
    out << "class " << classes_[i] << ' ' << doc_counts_[i] << ' ' << token_totals_[i] << '\n';
  out << "vocabulary " << counts_.size() << '\n';
  for (const auto& [token, per_class] : counts_) {
    out << "token " << token;
    for (std::size_t n : per_class) out << ' ' << n;
    out << '\n';
  }
}

SizingModel SizingModel::load(std::istream& in) {
  auto bad = [](const std::string& what) { return Error(Errc::parse, "sizing model: " + what); };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "rulcast-sizer") throw bad("not a sizing model file");
  if (version != 1) throw bad("unsupported version " + std::to_string(version));
  std::string key;
  double alpha = 0;
  std::size_t n_classes = 0;
  if (!(in >> key >> alpha) || key != "alpha") throw bad("expected alpha");
  if (!(in >> key >> n_classes) || key != "classes") throw bad("expected classes");
  std::vector<int> classes(n_classes);
  std::vector<std::size_t> docs(n_classes), totals(n_classes);
  for (std::size_t i = 0; i < n_classes; ++i)
    if (!(in >> key >> classes[i] >> docs[i] >> totals[i]) || key != "class") throw bad("expected class line");
  std::size_t vocab = 0;
  if (!(in >> key >> vocab) || key != "vocabulary") throw bad("expected vocabulary");
  std::map<std::string, std::vector<std::size_t>> counts;
  for (std::size_t v = 0; v < vocab; ++v) {
    std::string token;
    if (!(in >> key >> token) || key != "token") throw bad("expected token line");
    std::vector<std::size_t> per_class(n_classes);
    for (auto& n : per_class)
      if (!(in >> n)) throw bad("truncated counts for '" + token + "'");
    counts.emplace(std::move(token), std::move(per_class));
  }
  return SizingModel(alpha, std::move(classes), std::move(docs), std::move(totals), std::move(counts));
}

SizingModel train_sizer(const std::vector<LabeledDoc>& corpus, double alpha) {
  if (corpus.empty()) throw Error(Errc::training, "training corpus is empty");
  if (!(alpha > 0)) throw Error(Errc::parameter, "smoothing alpha must be > 0");
  std::vector<int> classes;
  for (const auto& doc : corpus) {
    if (doc.story_points != 1 && doc.story_points != 2 && doc.story_points != 3 && doc.story_points != 5 &&
        doc.story_points != 8)
      throw Error(Errc::training, "story-point class " + std::to_string(doc.story_points) + " outside 1,2,3,5,8");
    classes.push_back(doc.story_points);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  const std::size_t k = classes.size();
  std::vector<std::size_t> docs(k, 0), totals(k, 0);
  std::map<std::string, std::vector<std::size_t>> counts;
  for (const auto& doc : corpus) {
    std::size_t ci = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), doc.story_points) - classes.begin());
    ++docs[ci];
    for (const auto& token : doc.tokens) {
      auto& per_class = counts[token];
      if (per_class.empty()) per_class.assign(k, 0);
      ++per_class[ci];
      ++totals[ci];
    }
  }
  return SizingModel(alpha, std::move(classes), std::move(docs), std::move(totals), std::move(counts));
}

Posterior posterior(const SizingModel& model, const TokenList& doc) {
  const auto& classes = model.classes();
  std::vector<double> log_scores(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double s = std::log(model.prior(c));
    for (const auto& token : doc) s += std::log(model.likelihood(token, c));
    log_scores[c] = s;
  }
  double norm = log_sum_exp(log_scores);
  Posterior out;
  out.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) out.emplace_back(classes[c], std::exp(log_scores[c] - norm));
  return out;
}

int argmax_class(const std::vector<int>& classes, const std::vector<double>& scores) {
  if (classes.empty() || classes.size() != scores.size())
    throw Error(Errc::parameter, "class and score vectors must be non-empty and equal length");
  std::size_t best = 0;
  for (std::size_t i = 1; i < classes.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && classes[i] < classes[best])) best = i;
  }
  return classes[best];
}

int classify_sp(const SizingModel& model, const TokenList& doc) {
  // Compare unnormalized log scores so ties are exact rather than subject
  // to the rounding of the normalization step.
  const auto& classes = model.classes();
  std::vector<double> scores(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    double s = std::log(model.prior(c));
    for (const auto& token : doc) s += std::log(model.likelihood(token, c));
    scores[c] = s;
  }
  return argmax_class(classes, scores);
}

std::size_t class_slot(int story_points) {
  switch (story_points) {
    case 1: return 0;
    case 2: return 1;
    case 3: return 2;
    case 5: return 3;
    case 8: return 4;
    default: throw Error(Errc::parameter, "story-point class " + std::to_string(story_points) + " outside 1,2,3,5,8");
  }
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (std::size_t v : row) n += v;
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
  return n;
}

double ConfusionMatrix::accuracy() const {
  std::size_t n = total();
  if (n == 0) throw Error(Errc::evaluation, "confusion matrix is empty");
  return static_cast<double>(correct()) / static_cast<double>(n);
}

ConfusionMatrix evaluate(const SizingModel& model, const std::vector<LabeledDoc>& test_set) {
  if (test_set.empty()) throw Error(Errc::evaluation, "test set is empty");
  ConfusionMatrix cm;
  for (const auto& doc : test_set) ++cm.counts[class_slot(doc.story_points)][class_slot(classify_sp(model, doc.tokens))];
  return cm;
}

std::vector<TextSample> load_training_corpus(std::istream& in) {
  if (!in) throw Error(Errc::io, "training corpus is not readable");
  CsvReader reader(in);
  CsvRow row;
  if (!reader.next(row)) throw ParseError(0, "<header>", "empty training corpus");
  std::size_t text_col = row.size(), sp_col = row.size();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (trim(row[i]) == "text") text_col = i;
    if (trim(row[i]) == "story_points") sp_col = i;
  }
  if (text_col == row.size()) throw ParseError(0, "text", "missing required column");
  if (sp_col == row.size()) throw ParseError(0, "story_points", "missing required column");
  std::vector<TextSample> out;
  std::size_t n = 0;
  while (reader.next(row)) {
    ++n;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() <= std::max(text_col, sp_col)) throw ParseError(n, "<record>", "too few columns");
    std::string sp = trim(row[sp_col]);
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(sp, &used);
      if (used != sp.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(n, "story_points", "not an integer '" + sp + "'");
    }
    if (value != 1 && value != 2 && value != 3 && value != 5 && value != 8)
      throw ParseError(n, "story_points", "story points must be one of 1,2,3,5,8 (got '" + sp + "')");
    out.push_back({row[text_col], value});
  }
  return out;
}

std::vector<LabeledDoc> tokenize_corpus(const std::vector<TextSample>& samples, const StopWords& stop_words) {
  std::vector<LabeledDoc> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({normalize(s.text, stop_words), s.story_points});
  return out;
}

}  // namespace rulcast::nlp
