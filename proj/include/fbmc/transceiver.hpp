#pragma once

#include "fbmc/channel.hpp"
#include "fbmc/matrix.hpp"
#include "fbmc/waveform.hpp"

namespace fbmc {

struct Equalizer {
    EqualizerKind kind = EqualizerKind::MMSE;
    cvec E;
    rvec beta;
};

Equalizer make_equalizer(const cvec& C, EqualizerKind kind, double sigma2, double delta2);

cvec fbmc_transmit(const QamBlock& S, const BandedFilterMatrix& P, OpCounter* ops = nullptr);

// Filter-bank output before equalization: y_m = F (R) P^H r segment m.
QamBlock fbmc_demodulate(const cvec& r, const BandedFilterMatrix& P, const InverseFilterMatrix* R,
                         OpCounter* ops = nullptr);

struct ReceivedBlock {
    QamBlock estimates;
    ReceiverMode mode = ReceiverMode::NIF;
};

ReceivedBlock fbmc_receive(const cvec& r, const BandedFilterMatrix& P, const InverseFilterMatrix* R,
                           const Equalizer& eq, OpCounter* ops = nullptr);

void equalize(QamBlock& Y, const Equalizer& eq);

// CP-OFDM. Transmit: M symbols of N+cp samples each.
cvec ofdm_transmit(const QamBlock& S, int cpLen);
QamBlock ofdm_demodulate(const cvec& r, int N, int M, int cpLen);

// Noise variance that puts OFDM at equal transmit energy per information symbol.
double ofdm_noise_variance(double sigma2, int N, int cpLen);

// One OFDM symbol over channel h with CP energy penalty applied to the noise.
cvec ofdm_roundtrip(const cvec& s, const cvec& h, double sigma2, int cpLen, EqualizerKind kind,
                    double delta2, Rng& rng);

}  // namespace fbmc
