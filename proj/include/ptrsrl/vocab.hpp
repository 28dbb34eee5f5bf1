#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ptrsrl/conll.hpp"

namespace ptrsrl {

/// String <-> index map. Index 0 is reserved for unknown entries when the
/// vocabulary is built with an UNK symbol.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> specials);

  int add(const std::string& entry);
  /// Index of entry, or 0 (UNK) if absent.
  int index(const std::string& entry) const;
  bool contains(const std::string& entry) const { return ids_.count(entry) != 0; }
  const std::string& entry(int index) const { return entries_.at(index); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<std::string>& entries() const { return entries_; }

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> ids_;
};

inline constexpr const char* kUnknown = "<unk>";
inline constexpr const char* kWordBegin = "<bow>";
inline constexpr const char* kWordEnd = "<eow>";

/// Splits a UTF-8 string into code points (invalid bytes become single units).
std::vector<std::string> utf8_characters(const std::string& s);

/// Lemma column used for the lemma embedding: LEMMA, or PLEMMA when LEMMA is "_".
const std::string& lemma_of(const Token& token);

/// All symbol tables a model needs, built from training data.
struct Vocabularies {
  Vocabulary words{{kUnknown}};
  Vocabulary lemmas{{kUnknown}};
  Vocabulary chars{{kUnknown, kWordBegin, kWordEnd}};
  Vocabulary labels;
  std::vector<bool> root_label;  // label seen on an arc from the root
  std::vector<bool> arg_label;   // label seen on an arc between words

  static Vocabularies build(const std::vector<Sentence>& training);
  void write(std::ostream& out) const;
  /// Reads the sections produced by write(). Throws Error on a bad layout.
  static Vocabularies read(std::istream& in);
};

/// Pretrained vectors, text format: "token v1 ... vd" per line.
struct VectorTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  static VectorTable load(const std::string& path);
};

/// Per-token context vectors aligned with a CoNLL file: one whitespace
/// separated vector per line, blank line between sentences.
using ContextVectors = std::vector<std::vector<std::vector<double>>>;
ContextVectors load_context_vectors(const std::string& path);
ContextVectors read_context_vectors(std::istream& in);

}  // namespace ptrsrl
