#include "fewl/ranking/table.hpp"

#include <nlohmann/json.hpp>

#include "fewl/core/error.hpp"
#include "fewl/util/files.hpp"

namespace fewl {

using json = nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string table_to_csv(const ScoreTable& table, const std::string& manifest_digest) {
  std::string out;
  if (!manifest_digest.empty()) out += "# manifest_digest=" + manifest_digest + "\n";
  out += "question_id,answer_id,label,fewl";
  for (const auto& a : table.ablations) out += "," + csv_field(a);
  out += "\n";
  for (const auto& row : table.rows) {
    out += csv_field(row.question_id) + "," + csv_field(row.answer_id) + "," + std::string(to_string(row.label)) + "," +
           util::format_double(row.score.value);
    for (const auto& a : table.ablations) {
      auto it = row.baseline_scores.find(a);
      out += ",";
      if (it != row.baseline_scores.end()) out += util::format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string table_to_json(const ScoreTable& table, const std::string& manifest_digest) {
  json doc;
  doc["config_digest"] = table.config_digest;
  if (!manifest_digest.empty()) doc["manifest_digest"] = manifest_digest;
  doc["ablations"] = table.ablations;
  json rows = json::array();
  for (const auto& r : table.rows) {
    json jr;
    jr["question_id"] = r.question_id;
    jr["answer_id"] = r.answer_id;
    jr["label"] = std::string(to_string(r.label));
    jr["answer_text"] = r.answer_text;
    jr["fewl"] = r.score.value;
    jr["divergence"] = std::string(to_string(r.score.divergence));
    jr["empty_penalty_warning"] = r.score.empty_penalty_warning;
    json refs = json::array();
    for (const auto& t : r.score.per_reference) {
      refs.push_back({{"reference_id", t.reference_id},
                      {"similarity", t.similarity},
                      {"lambda", t.lambda},
                      {"weighted_truthfulness_term", t.weighted_truthfulness_term},
                      {"penalty_mean", t.penalty_mean},
                      {"penalty_term", t.penalty_term}});
    }
    jr["per_reference"] = std::move(refs);
    jr["baselines"] = r.baseline_scores;
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  json skips = json::array();
  for (const auto& s : table.skips) skips.push_back({{"question_id", s.question_id}, {"code", s.code}, {"message", s.message}});
  doc["skips"] = std::move(skips);
  return doc.dump(2) + "\n";
}

ScoreTable table_from_json(const std::string& text) {
  ScoreTable t;
  try {
    const json doc = json::parse(text);
    t.config_digest = doc.at("config_digest").get<std::string>();
    t.ablations = doc.value("ablations", std::vector<std::string>{});
    for (const auto& jr : doc.at("rows")) {
      ScoreRow r;
      r.question_id = jr.at("question_id").get<std::string>();
      r.answer_id = jr.at("answer_id").get<std::string>();
      r.label = parse_label(jr.value("label", "unknown")).value_or(Label::Unknown);
      r.answer_text = jr.value("answer_text", "");
      r.score.value = jr.at("fewl").get<double>();
      r.score.divergence = parse_divergence(jr.value("divergence", "tv"));
      r.score.config_digest = t.config_digest;
      r.score.empty_penalty_warning = jr.value("empty_penalty_warning", false);
      for (const auto& jt : jr.value("per_reference", json::array())) {
        r.score.per_reference.push_back({jt.at("reference_id").get<std::string>(), jt.at("similarity").get<double>(),
                                         jt.at("lambda").get<double>(), jt.at("weighted_truthfulness_term").get<double>(),
                                         jt.at("penalty_mean").get<double>(), jt.at("penalty_term").get<double>()});
      }
      r.baseline_scores = jr.value("baselines", std::map<std::string, double>{});
      t.rows.push_back(std::move(r));
    }
    for (const auto& js : doc.value("skips", json::array())) {
      t.skips.push_back({js.at("question_id").get<std::string>(), js.at("code").get<std::string>(),
                         js.value("message", "")});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, "scores.json", std::string("malformed score table: ") + e.what());
  }
  return t;
}

}  // namespace fewl
