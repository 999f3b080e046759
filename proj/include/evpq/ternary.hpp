#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace evpq {

/// Logical vector over {-1, 0, +1}: an EVP vertex or a b1.58 code.
struct TernaryVector {
  std::vector<std::int8_t> elems;
  /// The EVP nonzero budget x; empty for codes without a fixed budget (b1.58).
  std::optional<std::size_t> nonzero_budget;

  std::size_t size() const { return elems.size(); }
  std::size_t nonzeros() const {
    return static_cast<std::size_t>(
        std::count_if(elems.begin(), elems.end(), [](std::int8_t v) { return v != 0; }));
  }

  friend bool operator==(const TernaryVector&, const TernaryVector&) = default;
};

/// Throws ValidationError if an element is outside {-1, 0, 1} or the nonzero
/// count exceeds the budget.
void validate(const TernaryVector& v);

}  // namespace evpq
