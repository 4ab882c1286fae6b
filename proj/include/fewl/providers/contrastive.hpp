#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fewl/core/types.hpp"

namespace fewl {

// Generation prompt asking for `k` wrong answers, each with a corrected
// counterpart, laid out in the numbered "Wrong Answer / Non-Wrong Answer"
// template.
std::string render_contrastive_prompt(std::string_view question, int k);

// A reply filled in that template, one pair per paragraph.
std::string render_contrastive_reply(std::span<const ContrastivePair> pairs);

struct ContrastiveParse {
  std::vector<ContrastivePair> pairs;  // ascending index, at most `expected`
  int expected = 0;

  // Number of pairs the reply fell short by; 0 when complete.
  int missing() const { return expected > static_cast<int>(pairs.size()) ? expected - static_cast<int>(pairs.size()) : 0; }
};

// Extracts numbered (wrong, corrected) pairs. Recognises
//   "3. Wrong Answer: ... 3. Non-Wrong Answer: ..."
//   "2-th fake answer is: ... 2-th non-fake answer is: ..."
// with arbitrary whitespace and blank lines. Zero-based numbering is shifted
// to 1-based. Incomplete pairs are dropped; ParseFailure only when nothing
// parses.
ContrastiveParse parse_contrastive(std::string_view raw, int k_expected);

}  // namespace fewl
