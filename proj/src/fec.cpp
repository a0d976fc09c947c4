#include "fbmc/fec.hpp"

#include <array>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

namespace fbmc {

namespace {

constexpr int kStates = 64;
constexpr int kTail = kConstraintLength - 1;

inline unsigned parity(unsigned x) { return static_cast<unsigned>(std::popcount(x) & 1); }

// Register holds the newest bit in position 6; state is the register shifted right by one.
struct Branch {
    std::uint8_t c0, c1;
    std::uint8_t next;
};

const std::array<std::array<Branch, 2>, kStates>& trellis() {
    static const auto t = [] {
        std::array<std::array<Branch, 2>, kStates> tr{};
        for (unsigned s = 0; s < kStates; ++s)
            for (unsigned b = 0; b < 2; ++b) {
                const unsigned r = s | (b << 6);
                tr[s][b] = {static_cast<std::uint8_t>(parity(r & kGen0)), static_cast<std::uint8_t>(parity(r & kGen1)),
                            static_cast<std::uint8_t>(r >> 1)};
            }
        return tr;
    }();
    return t;
}

template <typename Cost>
bitvec viterbi(size_t steps, Cost cost) {
    const auto& tr = trellis();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<double, kStates> pm, nm;
    pm.fill(inf);
    pm[0] = 0.0;
    std::vector<std::array<std::uint8_t, kStates>> from(steps);  // predecessor state per step
    for (size_t t = 0; t < steps; ++t) {
        nm.fill(inf);
        const bool tail = t + kTail >= steps;
        for (unsigned s = 0; s < kStates; ++s) {
            if (pm[s] == inf) continue;
            for (unsigned b = 0; b < (tail ? 1u : 2u); ++b) {
                const Branch& br = tr[s][b];
                const double m = pm[s] + cost(t, br.c0, br.c1);
                if (m < nm[br.next]) {
                    nm[br.next] = m;
                    from[t][br.next] = static_cast<std::uint8_t>(s);
                }
            }
        }
        pm = nm;
    }
    bitvec out(steps);
    unsigned s = 0;
    for (size_t t = steps; t-- > 0;) {
        out[t] = static_cast<std::uint8_t>((s >> 5) & 1u);
        s = from[t][s];
    }
    out.resize(steps - kTail);
    return out;
}

void check_length(size_t n) {
    if (n % 2 != 0 || n < 2 * kTail + 2)
        throw std::invalid_argument("viterbi: coded length " + std::to_string(n) + " must be even and >= 14");
}

}  // namespace

bitvec conv_encode(const bitvec& bits) {
    bitvec out;
    out.reserve(2 * (bits.size() + kTail));
    unsigned r = 0;
    auto push = [&](unsigned b) {
        r = (r >> 1) | ((b & 1u) << 6);
        out.push_back(static_cast<std::uint8_t>(parity(r & kGen0)));
        out.push_back(static_cast<std::uint8_t>(parity(r & kGen1)));
    };
    for (auto b : bits) push(b);
    for (int i = 0; i < kTail; ++i) push(0);
    return out;
}

bitvec viterbi_decode_hard(const bitvec& coded) {
    check_length(coded.size());
    return viterbi(coded.size() / 2, [&](size_t t, unsigned c0, unsigned c1) {
        return static_cast<double>((c0 != coded[2 * t]) + (c1 != coded[2 * t + 1]));
    });
}

bitvec viterbi_decode_soft(const std::vector<double>& llr) {
    check_length(llr.size());
    return viterbi(llr.size() / 2, [&](size_t t, unsigned c0, unsigned c1) {
        return c0 * llr[2 * t] + c1 * llr[2 * t + 1];
    });
}

}  // namespace fbmc
