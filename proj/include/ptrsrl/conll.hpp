#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ptrsrl {

/// One CoNLL-2009 row. String columns are kept verbatim ("_" included) so a
/// read/write cycle reproduces the input bytes.
struct Token {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string plemma;
  std::string pos;
  std::string ppos;
  std::string feat;
  std::string pfeat;
  std::optional<int> head;
  std::optional<int> phead;
  std::string deprel;
  std::string pdeprel;
  bool fillpred = false;
  std::string pred;  // empty when the PRED column is "_"

  bool operator==(const Token&) const = default;
};

struct Argument {
  int position = 0;
  std::string role;

  bool operator==(const Argument&) const = default;
};

/// Predicate-argument structure of one APRED column.
struct Frame {
  int predicate = 0;
  std::string sense;  // PRED suffix after the last '.'
  std::vector<Argument> args;  // column reading order

  bool operator==(const Frame&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<Frame> frames;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct Warning {
  std::size_t line = 0;
  std::string message;
};

/// Splits a PRED value into (lemma part, sense). Without a '.' the whole value
/// is the sense and the lemma part is empty.
std::pair<std::string, std::string> split_pred(const std::string& pred);

/// Reads blank-line separated CoNLL-2009 blocks. CRLF line endings are
/// accepted; comment lines are rejected. Throws ParseError.
std::vector<Sentence> read_conll(std::istream& in,
                                 std::vector<Warning>* warnings = nullptr);
std::vector<Sentence> read_conll_file(const std::string& path,
                                      std::vector<Warning>* warnings = nullptr);

/// Throws SerializationError when a frame points outside its sentence.
void write_conll(std::ostream& out, const std::vector<Sentence>& sentences);
void write_conll_file(const std::string& path,
                      const std::vector<Sentence>& sentences);
std::string to_conll_string(const std::vector<Sentence>& sentences);

enum class StripMode { kKeepPredicates, kPlainText };

/// Removes gold annotation to build evaluation inputs. kKeepPredicates keeps
/// FILLPRED flags and one empty frame per flagged token; kPlainText removes
/// flags and frames as well.
Sentence strip_gold(const Sentence& sentence, StripMode mode);

}  // namespace ptrsrl
