#include "doctest.h"

#include <cmath>
#include <random>

#include "fbmc/fec.hpp"

using namespace fbmc;

namespace {

// GF(2) convolution with the generator taps written MSB first (current bit first).
bitvec reference_encode(const bitvec& u) {
    const int g0[7] = {1, 0, 1, 1, 0, 1, 1};
    const int g1[7] = {1, 1, 1, 1, 0, 0, 1};
    bitvec padded(u);
    padded.resize(u.size() + 6, 0);
    bitvec out;
    for (size_t t = 0; t < padded.size(); ++t) {
        int a = 0, b = 0;
        for (int j = 0; j < 7; ++j) {
            if (t < static_cast<size_t>(j)) break;
            a ^= g0[j] & padded[t - j];
            b ^= g1[j] & padded[t - j];
        }
        out.push_back(static_cast<std::uint8_t>(a));
        out.push_back(static_cast<std::uint8_t>(b));
    }
    return out;
}

bitvec random_bits(size_t n, std::mt19937_64& rng) {
    std::bernoulli_distribution b(0.5);
    bitvec v(n);
    for (auto& x : v) x = b(rng);
    return v;
}

std::vector<double> to_llr(const bitvec& c, double mag = 1.0) {
    std::vector<double> l(c.size());
    for (size_t i = 0; i < c.size(); ++i) l[i] = c[i] ? -mag : mag;
    return l;
}

}  // namespace

TEST_CASE("encoder basics") {
    const bitvec z = conv_encode(bitvec(10, 0));
    CHECK(z.size() == 32u);
    for (auto b : z) CHECK(b == 0);
    bitvec imp(1, 1);
    const bitvec r = conv_encode(imp);
    const bitvec expect{1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1};
    CHECK(r == expect);
    CHECK(conv_encode({}).size() == 12u);
}

TEST_CASE("encoder matches the reference convolution and is linear") {
    std::mt19937_64 rng(51);
    for (int len : {1, 2, 7, 33, 200}) {
        const bitvec a = random_bits(len, rng), b = random_bits(len, rng);
        CHECK(conv_encode(a) == reference_encode(a));
        bitvec s(len);
        for (int i = 0; i < len; ++i) s[i] = a[i] ^ b[i];
        const bitvec ea = conv_encode(a), eb = conv_encode(b), es = conv_encode(s);
        for (size_t i = 0; i < es.size(); ++i) CHECK(es[i] == (ea[i] ^ eb[i]));
    }
}

TEST_CASE("noiseless round trip for every length up to 256") {
    std::mt19937_64 rng(52);
    for (int len = 1; len <= 256; ++len) {
        const bitvec u = random_bits(len, rng);
        const bitvec c = conv_encode(u);
        CHECK(viterbi_decode_hard(c) == u);
        CHECK(viterbi_decode_soft(to_llr(c)) == u);
    }
}

TEST_CASE("every single error is corrected") {
    std::mt19937_64 rng(53);
    const bitvec u = random_bits(50, rng);
    const bitvec c = conv_encode(u);
    for (size_t pos = 0; pos < c.size(); ++pos) {
        bitvec e = c;
        e[pos] ^= 1;
        CHECK(viterbi_decode_hard(e) == u);
        auto l = to_llr(c);
        l[pos] = -l[pos];
        CHECK(viterbi_decode_soft(l) == u);
    }
}

TEST_CASE("soft metric is invariant to positive scaling") {
    std::mt19937_64 rng(54);
    std::normal_distribution<double> nd(0.0, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        const bitvec u = random_bits(64, rng);
        auto l = to_llr(conv_encode(u));
        for (auto& v : l) v += nd(rng);
        auto scaled = l;
        for (auto& v : scaled) v *= 7.25;
        CHECK(viterbi_decode_soft(l) == viterbi_decode_soft(scaled));
    }
}

TEST_CASE("coding gain over a noisy BPSK channel") {
    std::mt19937_64 rng(55);
    const double ebn0 = std::pow(10.0, 0.5);  // 5 dB
    const double sigma = std::sqrt(1.0 / (2.0 * 0.5 * ebn0));  // rate 1/2 coded bits
    const double sigmaU = std::sqrt(1.0 / (2.0 * ebn0));
    std::normal_distribution<double> nc(0.0, sigma), nu(0.0, sigmaU);
    long errHard = 0, errSoft = 0, errUnc = 0, bits = 0;
    for (int blk = 0; blk < 200; ++blk) {
        const bitvec u = random_bits(400, rng);
        const bitvec c = conv_encode(u);
        bitvec hard(c.size());
        std::vector<double> llr(c.size());
        for (size_t i = 0; i < c.size(); ++i) {
            const double y = (c[i] ? -1.0 : 1.0) + nc(rng);
            hard[i] = y < 0.0;
            llr[i] = 2.0 * y / (sigma * sigma);
        }
        const bitvec dh = viterbi_decode_hard(hard), ds = viterbi_decode_soft(llr);
        for (size_t i = 0; i < u.size(); ++i) {
            errHard += dh[i] != u[i];
            errSoft += ds[i] != u[i];
            errUnc += ((u[i] ? -1.0 : 1.0) + nu(rng) < 0.0) != static_cast<bool>(u[i]);
        }
        bits += static_cast<long>(u.size());
    }
    CHECK(errHard < errUnc);
    CHECK(errSoft < errHard);
    CHECK(errSoft < errUnc / 10);
}

TEST_CASE("malformed codewords are rejected") {
    CHECK_THROWS(viterbi_decode_hard(bitvec(13, 0)));
    CHECK_THROWS(viterbi_decode_hard(bitvec(12, 0)));
    CHECK_THROWS(viterbi_decode_soft(std::vector<double>(15, 1.0)));
    CHECK(viterbi_decode_hard(bitvec(14, 0)) == bitvec(1, 0));
}
