#pragma once

#include <string>

#include "fbmc/types.hpp"

namespace fbmc {

struct PrototypeFilter {
    rvec coeffs;  // unit energy, length K*N
    int K = 1;
    int N = 1;
};

std::vector<int> supported_overlaps();

// Frequency-sampling prototype (PHYDYAS family); K=1 is rectangular.
PrototypeFilter design_prototype(int K, int N);

// Frequency samples H_0..H_{K-1} used by design_prototype.
rvec prototype_frequency_samples(int K);

PrototypeFilter prototype_from_samples(const rvec& H, int N);

// One coefficient per line. Rescaled to unit energy.
PrototypeFilter load_prototype(const std::string& path, int K, int N);

void validate_prototype(const PrototypeFilter& w);

// Column m holds FBMC symbol s_m.
struct QamBlock {
    int N = 0;
    int M = 0;
    cvec data;  // data[m*N + n]

    QamBlock() = default;
    QamBlock(int n, int m) : N(n), M(m), data(static_cast<size_t>(n) * m) {}
    cd& at(int n, int m) { return data[static_cast<size_t>(m) * N + n]; }
    const cd& at(int n, int m) const { return data[static_cast<size_t>(m) * N + n]; }
};

// Gray-mapped square QAM, MSB of each group drives the in-phase axis.
int qam_bits_per_symbol(int order);
cvec qam_map(const std::vector<std::uint8_t>& bits, int order, double power);
std::vector<std::uint8_t> qam_demap(const cvec& symbols, int order, double power = 1.0);

// Max-log LLR = log P(b=0)/P(b=1) for y = gain*s + noise with complex noise variance noiseVar.
void qam_llr(cd y, double gain, double noiseVar, int order, double power, double* out);

cvec idft_block(const QamBlock& S);
QamBlock dft_block(const cvec& y, int N, int M);

}  // namespace fbmc
