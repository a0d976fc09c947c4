#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbmc {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using rvec = std::vector<double>;

enum class EqualizerKind { ZF, MMSE };
enum class ReceiverMode { NIF, IF };

std::string to_string(EqualizerKind k);
std::string to_string(ReceiverMode m);
EqualizerKind parse_equalizer(const std::string& s);
ReceiverMode parse_receiver_mode(const std::string& s);

struct SystemConfig {
    int N = 64;
    int M = 14;
    int K = 5;
    double symbolPower = 1.0;  // delta^2
    int modOrder = 16;
    double etaFraction = 0.0;
    EqualizerKind equalizer = EqualizerKind::MMSE;
    ReceiverMode receiverMode = ReceiverMode::IF;

    // Every violated field, empty when valid. channelLength = 0 skips the N >= 2L check.
    std::vector<std::string> violations(int channelLength = 0) const;
    void validate(int channelLength = 0) const;
};

// Thrown with all violations joined, one per line.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& v);
    std::vector<std::string> fields;
};

bool is_pow2(long v);

// Counts real multiplications; a complex-by-real product counts 2, complex-by-complex 4.
struct OpCounter {
    std::uint64_t realMults = 0;
};

}  // namespace fbmc
