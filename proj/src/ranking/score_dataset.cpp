#include "fewl/ranking/table.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <optional>

#include "fewl/core/error.hpp"
#include "fewl/scoring/fewl.hpp"
#include "fewl/similarity/index.hpp"
#include "fewl/util/rng.hpp"

namespace fewl {
namespace {

// Everything fetched from providers for one question.
struct Acquired {
  bool refs_ok = false;
  std::optional<SkipRecord> failure;
  EmbeddingVector question;
  std::vector<EmbeddingVector> ref_answers;  // per reference
  std::vector<EmbeddingVector> samples;      // per diversified draw
  std::vector<EmbeddingVector> iw, co;
  std::vector<EmbeddingVector> answers;      // per dataset answer
};

SkipRecord skip_from(const std::string& qid, const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return {qid, std::string(to_string(err->code())), err->what()};
  return {qid, "Internal", e.what()};
}

bool needs_samples(const ScoringConfig& config) {
  if (config.reference_mode == ReferenceMode::MultiSample) return true;
  return std::any_of(config.ablations.begin(), config.ablations.end(), [&](const std::string& a) {
    return ablation_cell(a, config).reference_mode == ReferenceMode::MultiSample;
  });
}

std::vector<EmbeddingVector> embed_all(const Embedder& embedder, const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); })) {
      throw Error(ErrorCode::EmptyText, "embed", "cannot embed empty text");
    }
  }
  auto out = embedder.embed_batch(texts);
  if (out.size() != texts.size()) throw Error(ErrorCode::ProviderUnavailable, embedder.identity(), "short embedding batch");
  return out;
}

Acquired acquire(const Question& q, const std::vector<Answer>& answers, const ScoringResources& res,
                 const ScoringConfig& config, bool want_samples, std::size_t single_idx) {
  Acquired a;
  try {
    a.question = embed(*res.embedder, q.text);
    std::vector<std::string> texts;
    for (const auto& ref : res.references) texts.push_back(ref->answer(q, 0));
    a.ref_answers = embed_all(*res.embedder, texts);
    if (want_samples) {
      texts.clear();
      for (int s = 1; s <= config.multi_samples; ++s) texts.push_back(res.references[single_idx]->answer(q, s));
      a.samples = embed_all(*res.embedder, texts);
    }
    texts.clear();
    for (const auto& ans : answers) texts.push_back(ans.text);
    a.answers = embed_all(*res.embedder, texts);
    a.refs_ok = true;

    const ContrastiveParse parsed = res.generator->generate_contrastive(q, config.n_contrastive);
    std::vector<std::string> iw, co;
    for (const auto& p : parsed.pairs) {
      iw.push_back(p.iw_text);
      co.push_back(p.co_text);
    }
    a.iw = embed_all(*res.embedder, iw);
    a.co = embed_all(*res.embedder, co);
  } catch (const std::exception& e) {
    a.failure = skip_from(q.id, e);
  }
  return a;
}

}  // namespace

std::vector<std::string> ScoreTable::question_ids() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back() != r.question_id) out.push_back(r.question_id);
  }
  return out;
}

ScoreTable score_dataset(const QADataset& dataset, const ScoringResources& resources, const ScoringConfig& config) {
  config.validate();
  if (resources.references.empty()) throw Error(ErrorCode::ConfigError, "scoring.references", "no reference providers");
  if (!resources.generator || !resources.embedder) {
    throw Error(ErrorCode::ConfigError, "scoring", "generator and embedder are required");
  }

  const std::string digest = config.digest();
  std::vector<AblationCell> cells;
  for (const auto& a : config.ablations) cells.push_back(ablation_cell(a, config));

  std::size_t single_idx = 0;
  if (!config.single_reference.empty()) {
    auto it = std::find_if(resources.references.begin(), resources.references.end(),
                           [&](const auto& p) { return p->name() == config.single_reference; });
    if (it == resources.references.end()) {
      throw Error(ErrorCode::ConfigError, "scoring.single_reference",
                  "single_reference '" + config.single_reference + "' is not a configured reference");
    }
    single_idx = static_cast<std::size_t>(it - resources.references.begin());
  }

  const bool want_samples = needs_samples(config);
  const auto n = static_cast<std::ptrdiff_t>(dataset.questions.size());
  std::vector<Acquired> acquired(dataset.questions.size());

  // Provider-bound phase: one question per task, bounded by max_concurrency.
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, resources.max_concurrency))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Question& q = dataset.questions[i];
    acquired[i] = acquire(q, dataset.answers_for(q.id), resources, config, want_samples, single_idx);
  }

  std::vector<std::pair<std::string, EmbeddingVector>> index_items;
  std::map<std::string, std::size_t> ordinal;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!acquired[i].refs_ok) continue;
    index_items.emplace_back(dataset.questions[i].id, acquired[i].question);
    ordinal[dataset.questions[i].id] = static_cast<std::size_t>(i);
  }
  const QuestionIndex index = build_index(std::move(index_items));

  std::vector<std::vector<ScoreRow>> rows(dataset.questions.size());
  std::vector<std::optional<SkipRecord>> skips(dataset.questions.size());

  // CPU-bound phase.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Question& q = dataset.questions[i];
    const Acquired& a = acquired[i];
    if (a.failure) {
      skips[i] = a.failure;
      continue;
    }
    try {
      const NeighborSet nb =
          config.penalty_source == PenaltySource::KNN
              ? neighbors(index, q.id, static_cast<std::size_t>(config.n_neighbors), config.neighbor_lo,
                          config.neighbor_hi)
              : random_pool(index, q.id, static_cast<std::size_t>(config.random_pool_count), config.random_pool_hi,
                            util::derive_seed(config.seed, static_cast<std::uint64_t>(i)));

      const auto& answers = dataset.answers_for(q.id);
      std::vector<EmbeddingVector> non_hallu, hallu;
      for (std::size_t k = 0; k < answers.size(); ++k) {
        if (answers[k].label == Label::NonHallu) non_hallu.push_back(a.answers[k]);
        if (answers[k].label == Label::Hallu) hallu.push_back(a.answers[k]);
      }

      ReferenceBundle bundle;
      for (std::size_t r = 0; r < resources.references.size(); ++r) {
        ReferenceContext ctx;
        ctx.reference_id = resources.references[r]->name();
        ctx.answer = a.ref_answers[r];
        ctx.raw_expertise = raw_expertise(ctx.answer, a.iw, a.co);
        if (!non_hallu.empty() && !hallu.empty()) ctx.ideal_raw_expertise = ideal_raw_expertise(ctx.answer, non_hallu, hallu);
        for (const auto& e : nb.entries) ctx.neighbor_answers.push_back(acquired[ordinal.at(e.question_id)].ref_answers[r]);
        bundle.references.push_back(std::move(ctx));
      }
      for (std::size_t s = 0; s < a.samples.size(); ++s) {
        ReferenceContext ctx;
        ctx.reference_id = resources.references[single_idx]->name() + "#" + std::to_string(s + 1);
        ctx.answer = a.samples[s];
        for (const auto& e : nb.entries) ctx.neighbor_answers.push_back(acquired[ordinal.at(e.question_id)].samples[s]);
        bundle.samples.push_back(std::move(ctx));
      }

      std::vector<ScoreRow> out;
      for (std::size_t k = 0; k < answers.size(); ++k) {
        ScoreRow row;
        row.question_id = q.id;
        row.answer_id = answers[k].id;
        row.label = answers[k].label;
        row.answer_text = answers[k].text;
        row.score = baseline_score(a.answers[k], bundle, config, digest);
        for (const auto& cell : cells) {
          row.baseline_scores[cell.name] = baseline_score(a.answers[k], bundle, apply_cell(config, cell), digest).value;
        }
        out.push_back(std::move(row));
      }
      rows[i] = std::move(out);
    } catch (const std::exception& e) {
      skips[i] = skip_from(q.id, e);
    }
  }

  ScoreTable table;
  table.config_digest = digest;
  table.ablations = config.ablations;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (auto& r : rows[i]) table.rows.push_back(std::move(r));
    if (skips[i]) table.skips.push_back(std::move(*skips[i]));
  }
  return table;
}

}  // namespace fewl
