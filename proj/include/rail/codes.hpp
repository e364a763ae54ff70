#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rail/error.hpp"

namespace rail {

/// Chips stay exact integers (+1/-1) until waveform synthesis.
using Chips = std::vector<int>;

struct SpreadingCode {
  Chips chips;
  std::size_t tx_id = 0;

  std::size_t length() const noexcept { return chips.size(); }
};

struct CodeBook {
  std::vector<SpreadingCode> codes;
  std::size_t order = 0;

  std::size_t size() const noexcept { return codes.size(); }
  const SpreadingCode& operator[](std::size_t i) const { return codes.at(i); }
};

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Sylvester construction: H_1 = [1], H_2n = [[H, H], [H, -H]].
inline std::vector<Chips> hadamard_matrix(std::size_t order) {
  if (!is_power_of_two(order)) {
    throw Error(Errc::invalid_order, "Hadamard order must be a power of two >= 1, got " + std::to_string(order));
  }
  std::vector<Chips> h(order, Chips(order, 1));
  for (std::size_t n = 1; n < order; n <<= 1) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const int v = h[r][c];
        h[r][c + n] = v;
        h[r + n][c] = v;
        h[r + n][c + n] = -v;
      }
    }
  }
  return h;
}

/// Row i of the smallest Hadamard matrix that fits n_tx rows goes to transmitter i.
inline CodeBook build_codebook(std::size_t n_tx) {
  if (n_tx == 0) throw Error(Errc::invalid_count, "codebook needs at least one transmitter");
  const std::size_t order = next_power_of_two(n_tx);
  auto rows = hadamard_matrix(order);
  CodeBook book;
  book.order = order;
  book.codes.reserve(n_tx);
  for (std::size_t i = 0; i < n_tx; ++i) book.codes.push_back(SpreadingCode{std::move(rows[i]), i});
  return book;
}

inline Chips spread(int bit, const SpreadingCode& code) {
  if (bit != 1 && bit != -1) throw Error(Errc::invalid_parameter, "bit must be +1 or -1");
  Chips out(code.chips.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = bit * code.chips[k];
  return out;
}

inline double despread(std::span<const int> chips, const SpreadingCode& code) {
  if (chips.size() != code.chips.size() || chips.empty()) {
    throw Error(Errc::dimension, "despread length mismatch: " + std::to_string(chips.size()) + " vs " +
                                     std::to_string(code.chips.size()));
  }
  long acc = 0;
  for (std::size_t k = 0; k < chips.size(); ++k) acc += static_cast<long>(chips[k]) * code.chips[k];
  return static_cast<double>(acc) / static_cast<double>(chips.size());
}

}  // namespace rail
