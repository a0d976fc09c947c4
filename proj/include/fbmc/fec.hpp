#pragma once

#include <cstdint>
#include <vector>

namespace fbmc {

using bitvec = std::vector<std::uint8_t>;

constexpr int kConstraintLength = 7;
constexpr unsigned kGen0 = 0133;
constexpr unsigned kGen1 = 0171;

// Rate 1/2, zero-terminated: output length 2*(len+6).
bitvec conv_encode(const bitvec& bits);

enum class DecodeMode { Hard, Soft };

// Hard: input coded bits (0/1). Returns len/2 - 6 information bits.
bitvec viterbi_decode_hard(const bitvec& coded);
// Soft: input LLR = log P(0)/P(1) per coded bit.
bitvec viterbi_decode_soft(const std::vector<double>& llr);

}  // namespace fbmc
