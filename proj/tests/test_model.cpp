#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "gradcheck.hpp"
#include "ptrsrl/error.hpp"
#include "ptrsrl/model.hpp"
#include "support.hpp"

using namespace ptrsrl;

namespace {

ModelConfig tiny(int hidden = 8) {
  ModelConfig c;
  c.word_dim = 5;
  c.lemma_dim = 4;
  c.char_emb_dim = 3;
  c.char_filters = 6;
  c.indicator_dim = 2;
  c.hidden = hidden;
  c.encoder_layers = 2;
  c.dropout = 0.0;
  return c;
}

std::vector<double> values(nn::Expr e) { return {e.values().begin(), e.values().end()}; }

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// s_t for the first decoder step of state.
nn::Expr first_step(SentenceSession& s, const ParserState& state) {
  DecoderMemory next;
  return s.decoder_step(state, s.initial_memory(), next);
}

}  // namespace

TEST_CASE("config defaults follow the reference setup at desk scale") {
  const ModelConfig c;
  CHECK(c.char_emb_dim == 100);
  CHECK(c.char_filters == 100);
  CHECK(c.char_window == 3);
  CHECK(c.indicator_dim == 16);
  CHECK(c.encoder_layers == 3);
  CHECK(c.decoder_layers == 1);
  CHECK(c.hidden == 64);
  CHECK(c.dropout == 0.33);
  CHECK(c.beam == 5);
  CHECK(c.perceptron_dim() == 32);
  CHECK_NOTHROW(c.validate());
  ModelConfig bad = c;
  bad.beam = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = c;
  bad.hidden = 0;
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("config text round-trips and rejects unknown keys") {
  ModelConfig c = tiny();
  c.use_coparent = false;
  c.dropout = 0.125;
  std::stringstream ss;
  c.write(ss);
  const ModelConfig back = ModelConfig::read(ss);
  CHECK(back.hidden == c.hidden);
  CHECK(back.dropout == 0.125);
  CHECK_FALSE(back.use_coparent);
  CHECK(back.input_dim() == c.input_dim());
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ContractError);
}

TEST_CASE("embedding dimension is the sum of the enabled parts") {
  const auto corpus = testing::toy_corpus(1, 3, 4, 8);
  const Vocabularies vocab = Vocabularies::build(corpus);
  ModelConfig c = tiny();
  c.gold_predicates = true;
  c.use_context_vectors = true;
  c.context_dim = 7;
  CHECK(c.input_dim() == 5 + 4 + 6 + 7 + 2);
  c.use_context_vectors = false;
  c.gold_predicates = false;
  CHECK(c.input_dim() == 5 + 4 + 6);  // indicator needs gold predicates

  for (bool lemma : {true, false})
    for (bool chars : {true, false}) {
      ModelConfig v = tiny();
      v.use_lemma = lemma;
      v.use_char = chars;
      PointerModel model(v, vocab, 3);
      const SentenceInput in = model.featurize(corpus[0]);
      nn::Graph g;
      SentenceSession s(model, g, in, false, nullptr);
      const int expect = 5 + (lemma ? 4 : 0) + (chars ? 6 : 0);
      for (const nn::Expr& e : s.embeddings()) CHECK(e.dims().rows == expect);
      CHECK(model.params().contains("emb.lemma") == lemma);
      CHECK(model.params().contains("char.filters") == chars);
    }
}

TEST_CASE("identical tokens get identical representations") {
  Sentence s;
  for (int id = 1; id <= 4; ++id) s.tokens.push_back(testing::make_token(id, id % 2 ? "bank" : "rose"));
  for (Token& t : s.tokens) t.head = 0, t.phead = 0, t.deprel = "X", t.pdeprel = "X";
  PointerModel model(tiny(), Vocabularies::build({s}), 2);
  const SentenceInput in = model.featurize(s);
  nn::Graph g;
  SentenceSession session(model, g, in, false, nullptr);
  CHECK(values(session.embeddings()[0]) == values(session.embeddings()[2]));
  CHECK(values(session.embeddings()[1]) == values(session.embeddings()[3]));
  CHECK(values(session.embeddings()[0]) != values(session.embeddings()[1]));
}

TEST_CASE("unknown words fall back to the UNK row") {
  const auto corpus = testing::toy_corpus(2, 2, 3, 5);
  PointerModel model(tiny(), Vocabularies::build(corpus), 2);
  Sentence odd = corpus[0];
  odd.tokens[0].form = "zzzz-unseen";
  odd.tokens[0].lemma = "zzzz-unseen";
  const SentenceInput in = model.featurize(odd);
  CHECK(in.words[0] == 0);
  CHECK(in.lemmas[0] == 0);
}

TEST_CASE("encoder output has n + 1 vectors of twice the hidden size") {
  const auto corpus = testing::toy_corpus(3, 1, 6, 6);
  PointerModel model(tiny(6), Vocabularies::build(corpus), 4);
  nn::Graph g;
  const SentenceInput in = model.featurize(corpus[0]);
  SentenceSession s(model, g, in, false, nullptr);
  REQUIRE(s.encoded().size() == 7);
  for (const auto& h : s.encoded()) CHECK(h.dims().rows == 12);
  CHECK(values(s.encoded()[0]) == model.param("enc.root").value.values);
}

TEST_CASE("reversing the input swaps the encoder directions") {
  Sentence s;
  const char* forms[] = {"fund", "managers", "say"};
  for (int id = 1; id <= 3; ++id) s.tokens.push_back(testing::make_token(id, forms[id - 1]));
  Sentence r;
  for (int id = 1; id <= 3; ++id) r.tokens.push_back(testing::make_token(id, forms[3 - id]));
  ModelConfig c = tiny(4);
  c.encoder_layers = 1;
  PointerModel model(c, Vocabularies::build({s}), 9);
  for (const char* part : {"wx", "wh", "b"})
    model.param(std::string("enc.L0.bwd.") + part).value =
        model.param(std::string("enc.L0.fwd.") + part).value;
  nn::Graph g;
  const SentenceInput in_s = model.featurize(s), in_r = model.featurize(r);
  SentenceSession a(model, g, in_s, false, nullptr);
  SentenceSession b(model, g, in_r, false, nullptr);
  for (int k = 1; k <= 3; ++k) {
    const auto fwd = values(a.encoded()[4 - k]);
    const auto bwd = values(b.encoded()[k]);
    for (int d = 0; d < 4; ++d) CHECK(bwd[4 + d] == doctest::Approx(fwd[d]).epsilon(1e-14));
  }
}

TEST_CASE("zero biaffine weights give a uniform pointer") {
  const auto corpus = testing::toy_corpus(4, 1, 5, 5);
  PointerModel model(tiny(), Vocabularies::build(corpus), 4);
  for (const char* name : {"ptr.W", "ptr.U", "ptr.V", "ptr.b"})
    for (double& v : model.param(name).value.values) v = 0.0;
  nn::Graph g;
  const SentenceInput in = model.featurize(corpus[0]);
  SentenceSession s(model, g, in, false, nullptr);
  const auto alpha = softmax_values(values(s.pointer_scores(first_step(s, ParserState{}))));
  REQUIRE(alpha.size() == 6);
  for (double a : alpha) CHECK(a == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("pointer and label scores match a hand expansion") {
  const auto corpus = testing::toy_corpus(5, 1, 4, 4);
  ModelConfig c = tiny(4);
  c.mlp_dim = 2;
  PointerModel model(c, Vocabularies::build(corpus), 6);
  nn::Graph g;
  const SentenceInput in = model.featurize(corpus[0]);
  SentenceSession s(model, g, in, false, nullptr);
  const nn::Expr st = first_step(s, ParserState{});
  const auto sv = values(st);

  auto perceptron = [&](const std::string& prefix, const std::vector<double>& x) {
    const auto& w = model.param(prefix + ".w").value;
    const auto& b = model.param(prefix + ".b").value;
    std::vector<double> out(2);
    for (int r = 0; r < 2; ++r) {
      double acc = b.values[r];
      for (std::size_t k = 0; k < x.size(); ++k) acc += w.at(r, k) * x[k];
      out[r] = acc >= 0 ? acc : std::exp(acc) - 1.0;
    }
    return out;
  };
  const auto f1 = perceptron("ptr.f1", sv);
  const auto& W = model.param("ptr.W").value;
  const auto& U = model.param("ptr.U").value;
  const auto& V = model.param("ptr.V").value;
  const double b = model.param("ptr.b").value.values[0];
  const auto scores = values(s.pointer_scores(st));
  for (int k = 0; k <= 4; ++k) {
    const auto f2 = perceptron("ptr.f2", values(s.encoded()[k]));
    double v = b;
    for (int x = 0; x < 2; ++x) {
      v += U.values[x] * f1[x] + V.values[x] * f2[x];
      for (int y = 0; y < 2; ++y) v += f1[x] * W.at(x, y) * f2[y];
    }
    CHECK(scores[k] == doctest::Approx(v).epsilon(1e-13));
  }

  const int head = 2;
  const auto g1 = perceptron("lab.g1", sv);
  const auto g2 = perceptron("lab.g2", values(s.encoded()[head]));
  const auto& LW = model.param("lab.W").value;
  const auto& LU = model.param("lab.U").value;
  const auto& LV = model.param("lab.V").value;
  const auto& Lb = model.param("lab.b").value;
  const auto u = values(s.label_scores(st, head));
  REQUIRE(static_cast<int>(u.size()) == model.vocab().labels.size());
  for (int l = 0; l < static_cast<int>(u.size()); ++l) {
    double v = Lb.values[l];
    for (int x = 0; x < 2; ++x) {
      v += LU.at(l, x) * g1[x] + LV.at(l, x) * g2[x];
      for (int y = 0; y < 2; ++y) v += g1[x] * LW.at(l, x * 2 + y) * g2[y];
    }
    CHECK(u[l] == doctest::Approx(v).epsilon(1e-13));
  }
  const auto beta = softmax_values(u);
  CHECK(sum(beta) == doctest::Approx(1.0).epsilon(1e-12));
  for (double& v : model.param("lab.W").value.values) v = 0;
  for (double& v : model.param("lab.U").value.values) v = 0;
  for (double& v : model.param("lab.V").value.values) v = 0;
  for (double& v : model.param("lab.b").value.values) v = 0;
  nn::Graph g_zero;
  SentenceSession z(model, g_zero, in, false, nullptr);
  for (double p : softmax_values(values(z.label_scores(first_step(z, ParserState{}), 1))))
    CHECK(p == doctest::Approx(1.0 / u.size()));
}

TEST_CASE("co-parent toggle controls the decoder input") {
  const auto corpus = testing::toy_corpus(6, 1, 6, 6);
  for (bool coparent : {true, false}) {
    ModelConfig c = tiny();
    c.use_coparent = coparent;
    PointerModel model(c, Vocabularies::build(corpus), 7);
    nn::Graph g;
    const SentenceInput in = model.featurize(corpus[0]);
    SentenceSession s(model, g, in, false, nullptr);
    const ParserState a{3, -1, {}};
    const ParserState b{3, 2, {{2, 3}}};
    const ParserState c2{3, 5, {{2, 3}, {5, 3}}};
    const auto ra = values(s.decoder_input(a));
    CHECK(ra == values(s.encoded()[3]));
    const auto alpha_a = values(s.pointer_scores(first_step(s, a)));
    const auto alpha_b = values(s.pointer_scores(first_step(s, b)));
    const auto alpha_c = values(s.pointer_scores(first_step(s, c2)));
    if (coparent) {
      CHECK(alpha_a != alpha_b);
      CHECK(alpha_b != alpha_c);
    } else {
      CHECK(alpha_a == alpha_b);
      CHECK(alpha_a == alpha_c);
    }
  }
}

TEST_CASE("selection walks positions by score") {
  const int n = 4;
  const ParserState s{2, -1, {{0, 2}}};
  // argmax is the focus word -> Shift
  CHECK(select(std::vector<double>{0.1, 0.1, 0.5, 0.2, 0.1}, s, n, Mode::full()) == Action::shift());
  // argmax 0 is blocked by an existing arc, next is 3
  CHECK(select(std::vector<double>{0.5, 0.05, 0.1, 0.3, 0.05}, s, n, Mode::full()) == Action::arc(3));
  // ties go to the lower position
  CHECK(select(std::vector<double>{0.1, 0.3, 0.1, 0.3, 0.2}, s, n, Mode::full()) == Action::arc(1));
  const ParserState after{2, 3, {{0, 2}, {3, 2}}};
  // heads at or below j are skipped
  CHECK(select(std::vector<double>{0.1, 0.6, 0.05, 0.05, 0.2}, after, n, Mode::full()) == Action::arc(4));
  CHECK(select(std::vector<double>{0.1, 0.6, 0.25, 0.05, 0.0}, after, n, Mode::full()) == Action::shift());
}

TEST_CASE("label choice respects the head type") {
  const auto corpus = testing::toy_corpus(7, 4, 4, 8);
  const Vocabularies vocab = Vocabularies::build(corpus);
  std::vector<double> scores(vocab.labels.size(), 0.0);
  int root_best = -1, arg_best = -1;
  for (int l = 0; l < vocab.labels.size(); ++l) {
    scores[l] = l;
    if (vocab.root_label[l]) root_best = l;
    if (vocab.arg_label[l]) arg_best = l;
  }
  REQUIRE(root_best >= 0);
  REQUIRE(arg_best >= 0);
  CHECK(best_label(scores, vocab, 0) == root_best);
  CHECK(best_label(scores, vocab, 3) == arg_best);
}

TEST_CASE("loss is finite and positive, and gradients check on a small model") {
  const auto corpus = testing::toy_corpus(8, 2, 4, 4);
  ModelConfig c = tiny(4);
  c.word_dim = 3;
  c.lemma_dim = 2;
  c.char_emb_dim = 2;
  c.char_filters = 2;
  PointerModel model(c, Vocabularies::build(corpus), 11);
  std::vector<SentenceInput> inputs;
  std::vector<SemGraph> golds;
  for (const Sentence& s : corpus) {
    inputs.push_back(model.featurize(s));
    golds.push_back(to_graph(s));
  }
  const auto report = testing::check_gradients(model.params(), [&](nn::Graph& g) {
    std::vector<nn::Expr> parts;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      SentenceSession s(model, g, inputs[k], false, nullptr);
      parts.push_back(model.loss(s, golds[k]));
    }
    return nn::sum(parts);
  });
  INFO(report.worst);
  CHECK(report.max_rel < 1e-4);
  nn::Graph g;
  SentenceSession s(model, g, inputs[0], false, nullptr);
  const double l = model.loss(s, golds[0]).value();
  CHECK(std::isfinite(l));
  CHECK(l > 0.0);
}

TEST_CASE("2-layer encoder with a biaffine pointer under 500 parameters") {
  Sentence s;
  for (int id = 1; id <= 3; ++id) s.tokens.push_back(testing::make_token(id, id == 2 ? "say" : "fund"));
  s.tokens[1].fillpred = true;
  s.tokens[1].pred = "say.01";
  s.frames.push_back({2, "01", {{1, "A0"}, {3, "A1"}}});
  ModelConfig c;
  c.word_dim = 2;
  c.use_lemma = false;
  c.use_char = false;
  c.hidden = 2;
  c.encoder_layers = 2;
  c.mlp_dim = 2;
  c.dropout = 0.0;
  PointerModel model(c, Vocabularies::build({s}), 13);
  CHECK(model.params().scalar_count() <= 500);
  const SentenceInput in = model.featurize(s);
  const SemGraph gold = to_graph(s);
  const auto report = testing::check_gradients(model.params(), [&](nn::Graph& g) {
    SentenceSession session(model, g, in, false, nullptr);
    return model.loss(session, gold);
  });
  INFO(report.worst);
  CHECK(report.max_rel < 1e-4);
}

TEST_CASE("checkpoint keeps config, vocabulary and weights") {
  const auto corpus = testing::toy_corpus(9, 3, 4, 6);
  ModelConfig c = tiny();
  c.use_coparent = false;
  PointerModel model(c, Vocabularies::build(corpus), 5);
  const std::string path = "ptrsrl_test_model.ck";
  model.save(path);
  const PointerModel back = PointerModel::from_checkpoint(path);
  std::remove(path.c_str());
  CHECK_FALSE(back.config().use_coparent);
  CHECK(back.vocab().words.size() == model.vocab().words.size());
  CHECK(back.vocab().labels.size() == model.vocab().labels.size());
  for (const auto& p : model.params().all())
    CHECK(back.param(p->name).value.values == p->value.values);
  const SentenceInput a = model.featurize(corpus[1]);
  const SentenceInput b = back.featurize(corpus[1]);
  CHECK(a.words == b.words);
  CHECK(a.chars == b.chars);
}

TEST_CASE("pretrained vectors initialize matching rows") {
  const auto corpus = testing::toy_corpus(10, 2, 4, 6);
  PointerModel model(tiny(), Vocabularies::build(corpus), 5);
  VectorTable table;
  table.dim = 5;
  const std::string word = corpus[0].tokens[0].form;
  table.vectors[word] = {1, 2, 3, 4, 5};
  table.vectors["never-seen"] = {0, 0, 0, 0, 0};
  CHECK(model.load_pretrained(table) >= 1);
  const int row = model.vocab().words.index(word);
  const auto& emb = model.param("emb.word").value;
  for (int k = 0; k < 5; ++k) CHECK(emb.at(row, k) == k + 1);
}
