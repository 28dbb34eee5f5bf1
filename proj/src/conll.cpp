#include "ptrsrl/conll.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ptrsrl/error.hpp"

namespace ptrsrl {

namespace {

constexpr std::size_t kFixedColumns = 14;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> parse_head(const std::string& field, std::size_t line,
                              const char* column) {
  if (field == "_") return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, std::string(column) + " is not an integer: '" + field + "'");
  }
  return value;
}

std::string head_field(const std::optional<int>& head) {
  return head ? std::to_string(*head) : std::string("_");
}

bool has_reserved(const std::string& s) {
  return s.find('|') != std::string::npos || s.find('#') != std::string::npos;
}

struct RawRow {
  std::size_t line;
  std::vector<std::string> fields;
};

Sentence build_sentence(const std::vector<RawRow>& rows,
                        std::vector<Warning>* warnings) {
  Sentence sentence;
  const std::size_t apreds = rows.front().fields.size() - kFixedColumns;
  std::vector<int> predicates;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::size_t line = rows[r].line;
    if (f.size() != rows.front().fields.size()) {
      throw ParseError(line, "row has " + std::to_string(f.size()) +
                                 " columns, sentence started with " +
                                 std::to_string(rows.front().fields.size()));
    }
    Token tok;
    int id = 0;
    auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), id);
    if (ec != std::errc() || ptr != f[0].data() + f[0].size() ||
        id != static_cast<int>(r) + 1) {
      throw ParseError(line, "expected id " + std::to_string(r + 1) + ", got '" +
                                 f[0] + "'");
    }
    tok.id = id;
    tok.form = f[1];
    tok.lemma = f[2];
    tok.plemma = f[3];
    tok.pos = f[4];
    tok.ppos = f[5];
    tok.feat = f[6];
    tok.pfeat = f[7];
    tok.head = parse_head(f[8], line, "HEAD");
    tok.phead = parse_head(f[9], line, "PHEAD");
    tok.deprel = f[10];
    tok.pdeprel = f[11];
    if (f[12] == "Y") {
      tok.fillpred = true;
    } else if (f[12] != "_") {
      throw ParseError(line, "FILLPRED must be 'Y' or '_', got '" + f[12] + "'");
    }
    tok.pred = f[13] == "_" ? std::string() : f[13];
    if (warnings && tok.fillpred && tok.pred.empty())
      warnings->push_back({line, "FILLPRED is set but PRED is empty"});
    if (warnings && !tok.fillpred && !tok.pred.empty())
      warnings->push_back({line, "PRED '" + tok.pred + "' without FILLPRED"});
    if (!tok.pred.empty()) {
      if (tok.pred.find('.') == std::string::npos && warnings)
        warnings->push_back({line, "PRED '" + tok.pred + "' has no lemma.sense separator"});
      if (has_reserved(split_pred(tok.pred).second))
        throw ParseError(line, "sense contains a reserved '|' or '#': '" + tok.pred + "'");
    }
    if (tok.fillpred) predicates.push_back(id);
    sentence.tokens.push_back(std::move(tok));
  }

  if (predicates.size() != apreds) {
    throw ParseError(rows.front().line,
                     std::to_string(apreds) + " APRED columns but " +
                         std::to_string(predicates.size()) + " FILLPRED rows");
  }

  for (std::size_t k = 0; k < apreds; ++k) {
    Frame frame;
    frame.predicate = predicates[k];
    frame.sense = split_pred(sentence.tokens[predicates[k] - 1].pred).second;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::string& cell = rows[r].fields[kFixedColumns + k];
      if (cell == "_") continue;
      std::set<std::string> seen;
      std::size_t start = 0;
      while (true) {
        std::size_t bar = cell.find('|', start);
        std::string role = cell.substr(start, bar == std::string::npos ? std::string::npos
                                                                        : bar - start);
        if (role.empty() || role == "_" || role.find('#') != std::string::npos)
          throw ParseError(rows[r].line, "invalid role in APRED cell '" + cell + "'");
        if (!seen.insert(role).second)
          throw ParseError(rows[r].line, "duplicate role '" + role + "' in APRED cell");
        frame.args.push_back({static_cast<int>(r) + 1, role});
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
    }
    sentence.frames.push_back(std::move(frame));
  }
  return sentence;
}

}  // namespace

std::pair<std::string, std::string> split_pred(const std::string& pred) {
  std::size_t dot = pred.rfind('.');
  if (dot == std::string::npos) return {std::string(), pred};
  return {pred.substr(0, dot), pred.substr(dot + 1)};
}

std::vector<Sentence> read_conll(std::istream& in, std::vector<Warning>* warnings) {
  std::vector<Sentence> sentences;
  std::vector<RawRow> block;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!block.empty()) {
        sentences.push_back(build_sentence(block, warnings));
        block.clear();
      }
      continue;
    }
    if (line.front() == '#') throw ParseError(lineno, "comment lines are not supported");
    auto fields = split_tabs(line);
    if (fields.size() < kFixedColumns) {
      throw ParseError(lineno, "expected at least 14 tab-separated columns, got " +
                                   std::to_string(fields.size()));
    }
    block.push_back({lineno, std::move(fields)});
  }
  if (!block.empty()) sentences.push_back(build_sentence(block, warnings));
  return sentences;
}

std::vector<Sentence> read_conll_file(const std::string& path,
                                      std::vector<Warning>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_conll(in, warnings);
}

void write_conll(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const Sentence& sent = sentences[s];
    const int n = static_cast<int>(sent.size());
    std::vector<int> predicates;
    for (const Token& t : sent.tokens)
      if (t.fillpred) predicates.push_back(t.id);
    if (predicates.size() != sent.frames.size()) {
      throw SerializationError("sentence " + std::to_string(s) + ": " +
                               std::to_string(sent.frames.size()) + " frames for " +
                               std::to_string(predicates.size()) + " FILLPRED tokens");
    }
    // cells[row][frame]
    std::vector<std::vector<std::string>> cells(
        n, std::vector<std::string>(sent.frames.size()));
    for (std::size_t k = 0; k < sent.frames.size(); ++k) {
      const Frame& frame = sent.frames[k];
      if (frame.predicate != predicates[k]) {
        throw SerializationError("sentence " + std::to_string(s) + ": frame " +
                                 std::to_string(k) + " is for token " +
                                 std::to_string(frame.predicate) + ", expected " +
                                 std::to_string(predicates[k]));
      }
      for (const Argument& a : frame.args) {
        if (a.position < 1 || a.position > n) {
          throw SerializationError("sentence " + std::to_string(s) +
                                   ": argument position " + std::to_string(a.position) +
                                   " out of range");
        }
        std::string& cell = cells[a.position - 1][k];
        if (!cell.empty()) cell += '|';
        cell += a.role;
      }
    }
    for (int r = 0; r < n; ++r) {
      const Token& t = sent.tokens[r];
      out << (r + 1) << '\t' << t.form << '\t' << t.lemma << '\t' << t.plemma << '\t'
          << t.pos << '\t' << t.ppos << '\t' << t.feat << '\t' << t.pfeat << '\t'
          << head_field(t.head) << '\t' << head_field(t.phead) << '\t' << t.deprel
          << '\t' << t.pdeprel << '\t' << (t.fillpred ? "Y" : "_") << '\t'
          << (t.pred.empty() ? "_" : t.pred);
      for (const std::string& cell : cells[r]) out << '\t' << (cell.empty() ? "_" : cell);
      out << '\n';
    }
    out << '\n';
  }
}

void write_conll_file(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_conll(out, sentences);
  if (!out) throw Error("write failed: " + path);
}

std::string to_conll_string(const std::vector<Sentence>& sentences) {
  std::ostringstream out;
  write_conll(out, sentences);
  return out.str();
}

Sentence strip_gold(const Sentence& sentence, StripMode mode) {
  Sentence out;
  out.tokens = sentence.tokens;
  for (Token& t : out.tokens) {
    t.pred.clear();
    if (mode == StripMode::kPlainText) t.fillpred = false;
  }
  if (mode == StripMode::kKeepPredicates) {
    for (const Token& t : out.tokens)
      if (t.fillpred) out.frames.push_back(Frame{t.id, "", {}});
  }
  return out;
}

}  // namespace ptrsrl
