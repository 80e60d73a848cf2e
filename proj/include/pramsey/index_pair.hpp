#pragma once

#include <compare>
#include <optional>
#include <string>

#include "pramsey/errors.hpp"

namespace pramsey {

/// An increasing pair {lo, hi} of positive integers — a vertex of the shift
/// graph and the index of a segment-configuration point.
struct IndexPair {
  int lo = 0;
  int hi = 0;

  IndexPair() = default;
  IndexPair(int a, int b) : lo(a), hi(b) {}

  void validate() const {
    if (lo < 1 || hi < 1) raise(ErrorKind::InvalidInput, "pair indices must be >= 1");
    if (lo >= hi) raise(ErrorKind::InvalidInput, "pair must be strictly increasing");
  }

  std::string str() const { return "(" + std::to_string(lo) + "," + std::to_string(hi) + ")"; }

  /// Inverse of str(); nullopt if the text is not "(a,b)".
  static std::optional<IndexPair> parse(const std::string& text) {
    if (text.size() < 5 || text.front() != '(' || text.back() != ')') return std::nullopt;
    auto comma = text.find(',');
    if (comma == std::string::npos) return std::nullopt;
    try {
      std::size_t used = 0;
      int a = std::stoi(text.substr(1, comma - 1), &used);
      if (used != comma - 1) return std::nullopt;
      int b = std::stoi(text.substr(comma + 1, text.size() - comma - 2), &used);
      if (used != text.size() - comma - 2) return std::nullopt;
      if (a < 1 || a >= b) return std::nullopt;
      return IndexPair(a, b);
    } catch (...) {
      return std::nullopt;
    }
  }

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

}  // namespace pramsey
