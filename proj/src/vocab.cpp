#include "ptrsrl/vocab.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ptrsrl/error.hpp"
#include "ptrsrl/graph.hpp"

namespace ptrsrl {

Vocabulary::Vocabulary(std::vector<std::string> specials) {
  for (const auto& s : specials) add(s);
}

int Vocabulary::add(const std::string& entry) {
  auto [it, inserted] = ids_.emplace(entry, static_cast<int>(entries_.size()));
  if (inserted) entries_.push_back(entry);
  return it->second;
}

int Vocabulary::index(const std::string& entry) const {
  auto it = ids_.find(entry);
  return it == ids_.end() ? 0 : it->second;
}

std::vector<std::string> utf8_characters(const std::string& s) {
  std::vector<std::string> out;
  std::size_t k = 0;
  while (k < s.size()) {
    const auto lead = static_cast<unsigned char>(s[k]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    if (k + len > s.size()) len = 1;
    for (std::size_t c = 1; c < len; ++c)
      if ((static_cast<unsigned char>(s[k + c]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    out.push_back(s.substr(k, len));
    k += len;
  }
  return out;
}

const std::string& lemma_of(const Token& token) {
  return token.lemma == "_" ? token.plemma : token.lemma;
}

Vocabularies Vocabularies::build(const std::vector<Sentence>& training) {
  Vocabularies v;
  for (const Sentence& s : training) {
    for (const Token& t : s.tokens) {
      v.words.add(t.form);
      v.lemmas.add(lemma_of(t));
      for (const std::string& c : utf8_characters(t.form)) v.chars.add(c);
    }
    for (const auto& [key, label] : to_graph(s).arcs) {
      const int id = v.labels.add(label);
      if (static_cast<int>(v.root_label.size()) <= id) {
        v.root_label.resize(id + 1, false);
        v.arg_label.resize(id + 1, false);
      }
      (key.head == 0 ? v.root_label : v.arg_label)[id] = true;
    }
  }
  return v;
}

namespace {

void write_section(std::ostream& out, const char* name, const Vocabulary& vocab) {
  out << "[" << name << "] " << vocab.size() << '\n';
  for (const auto& e : vocab.entries()) out << e << '\n';
}

Vocabulary read_section(std::istream& in, const std::string& name, bool with_unk,
                        int specials) {
  std::string header;
  if (!std::getline(in, header)) throw Error("vocabulary: missing [" + name + "]");
  std::istringstream hs(header);
  std::string tag;
  int count = -1;
  hs >> tag >> count;
  if (tag != "[" + name + "]" || count < 0) throw Error("vocabulary: bad header '" + header + "'");
  Vocabulary vocab;
  for (int k = 0; k < count; ++k) {
    std::string entry;
    if (!std::getline(in, entry)) throw Error("vocabulary: truncated [" + name + "]");
    vocab.add(entry);
  }
  if (with_unk && (vocab.size() < specials || vocab.entry(0) != kUnknown))
    throw Error("vocabulary: [" + name + "] lacks the unknown symbol");
  return vocab;
}

}  // namespace

void Vocabularies::write(std::ostream& out) const {
  write_section(out, "words", words);
  write_section(out, "lemmas", lemmas);
  write_section(out, "chars", chars);
  write_section(out, "labels", labels);
  out << "[label-kinds] " << labels.size() << '\n';
  for (int k = 0; k < labels.size(); ++k)
    out << (root_label[k] ? 'R' : '-') << (arg_label[k] ? 'A' : '-') << '\n';
}

Vocabularies Vocabularies::read(std::istream& in) {
  Vocabularies v;
  v.words = read_section(in, "words", true, 1);
  v.lemmas = read_section(in, "lemmas", true, 1);
  v.chars = read_section(in, "chars", true, 3);
  v.labels = read_section(in, "labels", false, 0);
  std::string header;
  std::getline(in, header);
  if (header != "[label-kinds] " + std::to_string(v.labels.size()))
    throw Error("vocabulary: bad header '" + header + "'");
  for (int k = 0; k < v.labels.size(); ++k) {
    std::string kinds;
    if (!std::getline(in, kinds) || kinds.size() != 2) throw Error("vocabulary: bad label kinds");
    v.root_label.push_back(kinds[0] == 'R');
    v.arg_label.push_back(kinds[1] == 'A');
  }
  return v;
}

VectorTable VectorTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vector file " + path);
  VectorTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof()) throw ParseError(lineno, "non-numeric vector component");
    if (table.dim == 0) table.dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != table.dim || v.empty())
      throw ParseError(lineno, "vector has " + std::to_string(v.size()) + " components, expected " +
                                   std::to_string(table.dim));
    table.vectors[token] = std::move(v);
  }
  return table;
}

ContextVectors read_context_vectors(std::istream& in) {
  ContextVectors out;
  std::vector<std::vector<double>> current;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      continue;
    }
    std::istringstream fields(line);
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof()) throw ParseError(lineno, "non-numeric context vector component");
    if (dim == 0) dim = v.size();
    if (v.size() != dim)
      throw ParseError(lineno, "context vector has " + std::to_string(v.size()) +
                                   " components, expected " + std::to_string(dim));
    current.push_back(std::move(v));
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

ContextVectors load_context_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open context vector file " + path);
  return read_context_vectors(in);
}

}  // namespace ptrsrl
