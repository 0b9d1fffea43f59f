#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace narr {

/// Lower-cased ASCII alphanumeric runs (apostrophes kept inside words).
std::vector<std::string> tokenize(std::string_view text);
std::set<std::string> token_set(std::string_view text);

}  // namespace narr
