#include "mock_corpus.hpp"

#include <cctype>
#include <set>

#include "fewl/providers/chat.hpp"
#include "fewl/providers/contrastive.hpp"
#include "fewl/similarity/index.hpp"

namespace fewl::acceptance {

namespace {

struct Cluster {
  std::string question;  // "{E}" placeholder
  std::string filler;    // empty: not padded
  std::vector<std::pair<std::string, std::string>> facts;
};

std::string fill(std::string t, const std::string& e) {
  t.replace(t.find("{E}"), 3, e);
  return t;
}

std::vector<Cluster> clusters() {
  return {
      {"What is the capital city of {E}?",
       " Like many capitals, it has served as the seat of government, culture and commerce for centuries.",
       {{"France", "Paris"}, {"Germany", "Berlin"}, {"Italy", "Rome"}, {"Spain", "Madrid"}, {"Portugal", "Lisbon"},
        {"Austria", "Vienna"}, {"Poland", "Warsaw"}, {"Greece", "Athens"}, {"Norway", "Oslo"}, {"Sweden", "Stockholm"}}},
      {"What is the chemical symbol of {E}?",
       "",
       {{"gold", "Au"}, {"silver", "Ag"}, {"iron", "Fe"}, {"copper", "Cu"}, {"lead", "Pb"}, {"sodium", "Na"},
        {"potassium", "K"}, {"tin", "Sn"}, {"mercury", "Hg"}, {"tungsten", "W"}}},
      {"Who wrote the novel {E}?",
       " The book has been translated into dozens of languages and remains widely studied in schools today.",
       {{"Hamlet", "William Shakespeare"}, {"Pride and Prejudice", "Jane Austen"}, {"War and Peace", "Leo Tolstoy"},
        {"Moby-Dick", "Herman Melville"}, {"Don Quixote", "Miguel de Cervantes"}, {"Ulysses", "James Joyce"},
        {"Beloved", "Toni Morrison"}, {"Dracula", "Bram Stoker"}, {"Frankenstein", "Mary Shelley"},
        {"Middlemarch", "George Eliot"}}},
      {"What is the official currency of {E}?",
       "",
       {{"Japan", "yen"}, {"India", "rupee"}, {"Mexico", "peso"}, {"Switzerland", "franc"},
        {"the United Kingdom", "pound sterling"}, {"China", "renminbi"}, {"Russia", "ruble"},
        {"South Korea", "won"}, {"Brazil", "real"}, {"Thailand", "baht"}}},
      {"Who is credited with inventing {E}?",
       "",
       {{"the telephone", "Alexander Graham Bell"}, {"the phonograph", "Thomas Edison"},
        {"the World Wide Web", "Tim Berners-Lee"}, {"dynamite", "Alfred Nobel"},
        {"the printing press", "Johannes Gutenberg"}, {"the radio", "Guglielmo Marconi"},
        {"the polio vaccine", "Jonas Salk"}, {"the cotton gin", "Eli Whitney"}, {"the jet engine", "Frank Whittle"},
        {"the periodic table", "Dmitri Mendeleev"}}},
  };
}

}  // namespace

MockCorpus build_mock_corpus() {
  MockCorpus c;
  c.reference_order = {"padded", "concise", "degraded"};
  std::map<std::string, std::string> value, filler;
  std::vector<std::pair<std::string, EmbeddingVector>> qv;
  const MockEmbedder emb(256, 0);
  int n = 0;
  for (const auto& cl : clusters()) {
    for (const auto& [entity, v] : cl.facts) {
      ++n;
      const std::string qid = std::string(n < 10 ? "q0" : "q") + std::to_string(n);
      c.dataset.questions.push_back({qid, fill(cl.question, entity), {}});
      qv.emplace_back(qid, embed(emb, c.dataset.questions.back().text));
      value[qid] = v;
      filler[qid] = cl.filler;
    }
  }

  // The lazy answer to a question is the correct answer to its most similar
  // neighbour.
  const auto index = build_index(qv);
  for (std::size_t i = 0; i < c.dataset.questions.size(); ++i) {
    const auto& q = c.dataset.questions[i];
    const auto nb = neighbors(index, q.id, 2, 0.2, 0.8).entries;
    const std::string& lazy = value.at(nb.at(0).question_id);
    const std::string& other = value.at(nb.at(1).question_id);
    const std::string right = value.at(q.id) + ".";
    const std::string wrong = lazy + "." + filler.at(q.id);

    c.dataset.answers[q.id] = {
        {q.id + "-nh", q.id, right, Label::NonHallu, "mock"},
        {q.id + "-hh", q.id, "Either " + value.at(q.id) + " or " + lazy + ", I am not sure.", Label::HalfHallu, "mock"},
        {q.id + "-h", q.id, wrong, Label::Hallu, "mock"},
    };
    c.iw[q.id] = {wrong, lazy + ".", other + "."};
    c.co[q.id] = {right, right, right};
    c.reference_answers["padded"][q.id] = right + filler.at(q.id);
    c.reference_answers["concise"][q.id] = right;
    c.reference_answers["degraded"][q.id] = lazy + ".";
  }
  return c;
}

ScoringResources mock_resources(const MockCorpus& corpus, const std::vector<std::string>& references, int threads) {
  auto make = [&](const std::string& name) {
    ProviderConfig pc;
    pc.name = name;
    pc.model = name + "-mock";
    pc.mode = ProviderMode::Mock;
    pc.max_concurrency = threads;
    const auto& answers = corpus.reference_answers.at(name);
    std::map<std::string, std::string> replies;
    for (const auto& [qid, iws] : corpus.iw) {
      std::vector<ContrastivePair> pairs;
      for (std::size_t i = 0; i < iws.size(); ++i) pairs.push_back({iws[i], corpus.co.at(qid)[i], int(i) + 1});
      replies[qid] = render_contrastive_reply(pairs);
    }
    return std::make_shared<const ChatProvider>(pc, nullptr, nullptr, [answers, replies](const ChatRequest& r) {
      return r.purpose == ChatPurpose::Contrastive ? replies.at(r.question_id) : answers.at(r.question_id);
    });
  };
  ScoringResources res;
  for (const auto& name : references) res.references.push_back(make(name));
  res.generator = make("concise");
  res.embedder = std::make_shared<MockEmbedder>(256, 0);
  res.max_concurrency = threads;
  return res;
}

double trigram_share(const std::string& a, const std::string& b) {
  auto grams = [](const std::string& s) {
    std::string p = " ";
    for (unsigned char ch : s) p.push_back(static_cast<char>(std::tolower(ch)));
    p.push_back(' ');
    std::set<std::string> out;
    for (std::size_t i = 0; i + 3 <= p.size(); ++i) out.insert(p.substr(i, 3));
    return out;
  };
  const auto ga = grams(a), gb = grams(b);
  if (ga.empty()) return 0;
  std::size_t shared = 0;
  for (const auto& g : ga) shared += gb.count(g);
  return static_cast<double>(shared) / static_cast<double>(ga.size());
}

}  // namespace fewl::acceptance
