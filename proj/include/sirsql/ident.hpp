#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace sirsql {

// Identifiers are case-insensitive and stored case-preserved.

inline char ascii_upper(char c) noexcept {
  return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

inline std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_upper);
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](char x, char y) { return ascii_upper(x) == ascii_upper(y); });
}

struct ILess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](char x, char y) { return ascii_upper(x) < ascii_upper(y); });
  }
};

inline bool ends_with_ci(std::string_view s, std::string_view suffix) noexcept {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

template <class Range>
bool contains_ci(const Range& names, std::string_view name) {
  return std::any_of(std::begin(names), std::end(names),
                     [&](const auto& n) { return iequals(n, name); });
}

}  // namespace sirsql
