#include "fbmc/transceiver.hpp"

#include <cmath>

#include "fbmc/fft.hpp"

namespace fbmc {

Equalizer make_equalizer(const cvec& C, EqualizerKind kind, double sigma2, double delta2) {
    if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be >= 0");
    Equalizer eq;
    eq.kind = kind;
    eq.E.resize(C.size());
    eq.beta.resize(C.size());
    const double nu = kind == EqualizerKind::MMSE ? 1.0 : 0.0;
    for (size_t n = 0; n < C.size(); ++n) {
        const double p = std::norm(C[n]);
        if (kind == EqualizerKind::ZF && p == 0.0)
            throw std::invalid_argument("zero-forcing equalizer: channel null at subcarrier " + std::to_string(n));
        const double den = p + nu * sigma2 / delta2;
        eq.E[n] = den > 0.0 ? std::conj(C[n]) / den : cd(0.0);
        eq.beta[n] = kind == EqualizerKind::ZF ? 1.0 : (den > 0.0 ? p / den : 0.0);
    }
    return eq;
}

cvec fbmc_transmit(const QamBlock& S, const BandedFilterMatrix& P, OpCounter* ops) {
    if (S.N != P.N || S.M != P.M) throw std::invalid_argument("fbmc_transmit: block shape does not match P");
    return apply_P(P, idft_block(S), ops);
}

QamBlock fbmc_demodulate(const cvec& r, const BandedFilterMatrix& P, const InverseFilterMatrix* R, OpCounter* ops) {
    cvec x = apply_P_adjoint(P, r, ops);
    if (R) {
        if (R->N != P.N || R->M != P.M) throw std::invalid_argument("fbmc_demodulate: R does not match P");
        x = apply_R(*R, x, ops);
    }
    return dft_block(x, P.N, P.M);
}

void equalize(QamBlock& Y, const Equalizer& eq) {
    if (eq.E.size() != static_cast<size_t>(Y.N)) throw std::invalid_argument("equalizer length mismatch");
    for (int m = 0; m < Y.M; ++m)
        for (int n = 0; n < Y.N; ++n) Y.at(n, m) *= eq.E[static_cast<size_t>(n)];
}

ReceivedBlock fbmc_receive(const cvec& r, const BandedFilterMatrix& P, const InverseFilterMatrix* R,
                           const Equalizer& eq, OpCounter* ops) {
    ReceivedBlock out;
    out.mode = R ? ReceiverMode::IF : ReceiverMode::NIF;
    out.estimates = fbmc_demodulate(r, P, R, ops);
    equalize(out.estimates, eq);
    return out;
}

cvec ofdm_transmit(const QamBlock& S, int cpLen) {
    if (cpLen < 0) throw std::invalid_argument("cyclic prefix length must be >= 0");
    const int N = S.N, sym = S.N + cpLen;
    cvec o(static_cast<size_t>(sym) * S.M);
    cvec t(static_cast<size_t>(N));
    for (int m = 0; m < S.M; ++m) {
        std::copy(S.data.begin() + static_cast<long>(m) * N, S.data.begin() + static_cast<long>(m + 1) * N, t.begin());
        idft_inplace(t.data(), N);
        cd* dst = &o[static_cast<size_t>(m) * sym];
        for (int c = 0; c < cpLen; ++c) dst[c] = t[static_cast<size_t>(N - cpLen + c)];
        std::copy(t.begin(), t.end(), dst + cpLen);
    }
    return o;
}

QamBlock ofdm_demodulate(const cvec& r, int N, int M, int cpLen) {
    if (cpLen < 0) throw std::invalid_argument("cyclic prefix length must be >= 0");
    const int sym = N + cpLen;
    if (r.size() < static_cast<size_t>(sym) * M) throw std::invalid_argument("ofdm_demodulate: short input");
    QamBlock Y(N, M);
    for (int m = 0; m < M; ++m) {
        std::copy(r.begin() + static_cast<long>(m) * sym + cpLen, r.begin() + static_cast<long>(m + 1) * sym,
                  Y.data.begin() + static_cast<long>(m) * N);
        dft_inplace(Y.data.data() + static_cast<size_t>(m) * N, N);
    }
    return Y;
}

double ofdm_noise_variance(double sigma2, int N, int cpLen) {
    return sigma2 * static_cast<double>(N + cpLen) / static_cast<double>(N);
}

cvec ofdm_roundtrip(const cvec& s, const cvec& h, double sigma2, int cpLen, EqualizerKind kind, double delta2,
                    Rng& rng) {
    if (cpLen < 0) throw std::invalid_argument("cyclic prefix length must be >= 0");
    const int N = static_cast<int>(s.size());
    QamBlock S(N, 1);
    S.data = s;
    cvec r = apply_channel(ofdm_transmit(S, cpLen), h);
    const double s2 = ofdm_noise_variance(sigma2, N, cpLen);
    add_noise(r, s2, rng);
    QamBlock Y = ofdm_demodulate(r, N, 1, cpLen);
    equalize(Y, make_equalizer(freq_response(h, N), kind, s2, delta2));
    return Y.data;
}

}  // namespace fbmc
