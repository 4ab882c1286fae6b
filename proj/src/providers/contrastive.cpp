#include "fewl/providers/contrastive.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>

#include "fewl/core/error.hpp"

namespace fewl {
namespace {

std::string template_line(int i) {
  const std::string n = std::to_string(i);
  // The second template line carries a stray '.' after the colon; kept as-is
  // because generators echo it back.
  if (i == 2) return n + ". Wrong Answer:. " + n + ". Non-Wrong Answer:";
  return n + ". Wrong Answer: " + n + ". Non-Wrong Answer:";
}

std::string trim_content(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  auto junk = [](unsigned char c) { return std::isspace(c) || c == '.' || c == ':' || c == '"'; };
  while (b < e && junk(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && (std::isspace(static_cast<unsigned char>(s[e - 1])) || s[e - 1] == '"')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string render_contrastive_prompt(std::string_view question, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k", "contrastive pair count must be >= 1");
  const std::string kk = std::to_string(k);
  std::string p = "For the question: " + std::string(question) + ", could you please generate " + kk +
                  " wrong answers. For each wrong answer (i.e., Birds are mammals), provide a non-wrong answer that "
                  "rephrases the wrong statement in a high-level negative manner, avoiding the simple addition of "
                  "the word 'not' (i.e., Birds don't belong to the mammalian class). Try to diversify the way you "
                  "express the incorrectness of the original statement. \n\n"
                  "In your response, please follow the template: \n\n";
  p += template_line(1) + "\n\n";
  if (k >= 2) p += template_line(2) + "\n\n";
  if (k >= 4) p += "... \n\n[Continue this pattern until " + kk + "]\n\n";
  if (k >= 3) p += template_line(k) + " ";
  return p;
}

std::string render_contrastive_reply(std::span<const ContrastivePair> pairs) {
  std::string out;
  for (const auto& pair : pairs) {
    const std::string n = std::to_string(pair.index);
    out += n + ". Wrong Answer: " + pair.iw_text + " " + n + ". Non-Wrong Answer: " + pair.co_text + "\n\n";
  }
  return out;
}

ContrastiveParse parse_contrastive(std::string_view raw, int k_expected) {
  static const std::regex marker(
      R"((\d+)\s*(?:-?\s*th|st|nd|rd)?\s*[.)]?\s*(non[- ]?wrong\s+answer|wrong\s+answer|non[- ]?fake\s+answer\s+is|fake\s+answer\s+is)\s*:?)",
      std::regex::icase | std::regex::ECMAScript);

  struct Slot {
    std::optional<std::string> wrong;
    std::optional<std::string> corrected;
  };
  std::map<int, Slot> slots;

  const std::string text(raw);
  struct Hit {
    int index;
    bool corrected;
    std::size_t content_begin;
    std::size_t match_begin;
  };
  std::vector<Hit> hits;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    std::string kind = m[2].str();
    std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
    int index = 0;
    try {
      index = std::stoi(m[1].str());
    } catch (const std::exception&) {
      continue;
    }
    hits.push_back({index, kind.rfind("non", 0) == 0, static_cast<std::size_t>(m.position(0) + m.length(0)),
                    static_cast<std::size_t>(m.position(0))});
  }

  for (std::size_t h = 0; h < hits.size(); ++h) {
    const std::size_t end = h + 1 < hits.size() ? hits[h + 1].match_begin : text.size();
    std::string content = trim_content(std::string_view(text).substr(hits[h].content_begin, end - hits[h].content_begin));
    Slot& slot = slots[hits[h].index];
    auto& field = hits[h].corrected ? slot.corrected : slot.wrong;
    if (!field && !content.empty()) field = std::move(content);
  }

  const int shift = (!slots.empty() && slots.begin()->first == 0) ? 1 : 0;
  ContrastiveParse out;
  out.expected = k_expected;
  for (auto& [index, slot] : slots) {
    if (!slot.wrong || !slot.corrected) continue;
    if (static_cast<int>(out.pairs.size()) >= k_expected) break;
    out.pairs.push_back({std::move(*slot.wrong), std::move(*slot.corrected), index + shift});
  }
  if (out.pairs.empty()) {
    throw Error(ErrorCode::ParseFailure, "contrastive", "no (wrong, corrected) answer pairs could be parsed");
  }
  return out;
}

}  // namespace fewl
