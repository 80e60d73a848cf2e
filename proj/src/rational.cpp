#include "pramsey/rational.hpp"

#include <cctype>

namespace pramsey {

namespace {

bool parse_bigint(std::string_view s, BigInt& out) {
  if (s.empty()) return false;
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) return false;
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

}  // namespace

std::optional<Rat> Rat::parse(std::string_view s) {
  // strip surrounding whitespace
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num, den;
    if (!parse_bigint(s.substr(0, slash), num)) return std::nullopt;
    if (!parse_bigint(s.substr(slash + 1), den)) return std::nullopt;
    if (den == 0) return std::nullopt;
    return Rat(std::move(num), std::move(den));
  }

  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (frac_part.empty()) return std::nullopt;
    bool neg = !int_part.empty() && int_part[0] == '-';
    BigInt whole = 0;
    if (!int_part.empty() && int_part != "-" && int_part != "+") {
      if (!parse_bigint(int_part, whole)) return std::nullopt;
    }
    BigInt frac;
    if (!parse_bigint(frac_part, frac) || frac < 0) return std::nullopt;
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
    BigInt num = (neg ? -whole : whole) * den + frac;
    return Rat(neg ? -num : num, std::move(den));
  }

  BigInt v;
  if (!parse_bigint(s, v)) return std::nullopt;
  return Rat(std::move(v));
}

std::string Rat::str() const {
  std::string out = num_.str();
  if (den_ != 1) {
    out += "/";
    out += den_.str();
  }
  return out;
}

}  // namespace pramsey
