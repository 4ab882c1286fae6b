#include "fewl/core/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "fewl/util/files.hpp"

namespace fewl {
namespace {

using json = nlohmann::json;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string summarize(const std::vector<Violation>& v) {
  std::ostringstream ss;
  ss << v.size() << " dataset violation(s):";
  for (const auto& x : v) ss << " " << to_string(x.code) << "(" << x.record_id << ")";
  return ss.str();
}

std::string str_field(const json& obj, const char* key, int line, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) {
      throw Error(ErrorCode::InvalidDataset, "line " + std::to_string(line),
                  "line " + std::to_string(line) + ": missing field '" + key + "'");
    }
    return {};
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidDataset, "line " + std::to_string(line),
                "line " + std::to_string(line) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

DatasetValidationError::DatasetValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::InvalidDataset : violations.front().code,
            violations.empty() ? std::string() : violations.front().record_id, summarize(violations)),
      violations_(std::move(violations)) {}

QADataset validate_dataset(const RawDataset& raw) {
  std::vector<Violation> violations;
  QADataset out;
  out.metadata = raw.metadata;

  std::set<std::string> ids;
  for (const auto& q : raw.questions) {
    if (!ids.insert(q.id).second) {
      violations.push_back({ErrorCode::DuplicateQuestionId, q.id, "question id appears more than once"});
      continue;
    }
    if (blank(q.text)) violations.push_back({ErrorCode::EmptyText, q.id, "question text is empty"});
    Question question{q.id, q.text, std::nullopt};
    if (!q.topic_hint.empty()) question.topic_hint = q.topic_hint;
    out.questions.push_back(std::move(question));
  }

  for (const auto& a : raw.answers) {
    if (!ids.count(a.question_id)) {
      violations.push_back({ErrorCode::DanglingAnswer, a.id, "question '" + a.question_id + "' does not exist"});
      continue;
    }
    if (blank(a.text)) violations.push_back({ErrorCode::EmptyText, a.id, "answer text is empty"});
    auto label = parse_label(a.label);
    if (!label) {
      violations.push_back({ErrorCode::InvalidDataset, a.id, "unknown label '" + a.label + "'"});
      label = Label::Unknown;
    }
    out.answers[a.question_id].push_back(Answer{a.id, a.question_id, a.text, *label, a.source});
  }

  if (!violations.empty()) throw DatasetValidationError(std::move(violations));
  return out;
}

RawDataset parse_dataset_jsonl(std::string_view text) {
  RawDataset raw;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (blank(line)) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidDataset, "line " + std::to_string(line_no),
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::InvalidDataset, "line " + std::to_string(line_no),
                  "line " + std::to_string(line_no) + ": expected a JSON object");
    }

    if (!obj.contains("question") && obj.contains("question_id")) {
      raw.answers.push_back({str_field(obj, "id", line_no, true), str_field(obj, "question_id", line_no, true),
                             str_field(obj, "text", line_no, true), str_field(obj, "label", line_no, false),
                             str_field(obj, "source", line_no, false)});
      continue;
    }

    RawQuestion q{str_field(obj, "id", line_no, true), str_field(obj, "question", line_no, true),
                  str_field(obj, "topic_hint", line_no, false)};
    if (auto it = obj.find("answers"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) {
        throw Error(ErrorCode::InvalidDataset, q.id, "line " + std::to_string(line_no) + ": 'answers' must be an array");
      }
      for (const auto& a : *it) {
        if (!a.is_object()) {
          throw Error(ErrorCode::InvalidDataset, q.id, "line " + std::to_string(line_no) + ": answer must be an object");
        }
        raw.answers.push_back({str_field(a, "id", line_no, true), q.id, str_field(a, "text", line_no, true),
                               str_field(a, "label", line_no, false), str_field(a, "source", line_no, false)});
      }
    }
    raw.questions.push_back(std::move(q));
  }
  return raw;
}

QADataset load_dataset(const std::filesystem::path& path) {
  return validate_dataset(parse_dataset_jsonl(util::read_file(path)));
}

std::string dataset_to_jsonl(const QADataset& dataset) {
  std::string out;
  for (const auto& q : dataset.questions) {
    json obj;
    obj["id"] = q.id;
    obj["question"] = q.text;
    if (q.topic_hint) obj["topic_hint"] = *q.topic_hint;
    json answers = json::array();
    for (const auto& a : dataset.answers_for(q.id)) {
      json ja;
      ja["id"] = a.id;
      ja["text"] = a.text;
      ja["label"] = a.label == Label::Unknown ? json(nullptr) : json(std::string(to_string(a.label)));
      ja["source"] = a.source;
      answers.push_back(std::move(ja));
    }
    obj["answers"] = std::move(answers);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fewl
