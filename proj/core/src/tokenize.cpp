#include "narr/tokenize.hpp"

namespace narr {

namespace {

bool is_word_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char lower(char c) noexcept { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool inner_apostrophe =
        c == '\'' && !cur.empty() && i + 1 < text.size() && is_word_char(text[i + 1]);
    if (is_word_char(c) || inner_apostrophe) {
      cur += lower(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::set<std::string> token_set(std::string_view text) {
  const auto toks = tokenize(text);
  return {toks.begin(), toks.end()};
}

}  // namespace narr
