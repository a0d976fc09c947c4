#include "fbmc/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "fbmc/fft.hpp"

namespace fbmc {

namespace {

// H_0 = 1 omitted. K=5 is fitted to the intrinsic ICI/ISI levels quoted for N=64, M=14.
const std::vector<std::pair<int, rvec>>& sample_table() {
    static const std::vector<std::pair<int, rvec>> table = {
        {1, {}},
        {2, {std::numbers::sqrt2 / 2}},
        {3, {0.911438, 0.411438}},
        {4, {0.971960, std::numbers::sqrt2 / 2, 0.235147}},
        {5, {0.999602, 0.951512, 0.307612, -0.028208}},
        {6, {0.99722, 0.94136, std::numbers::sqrt2 / 2, 0.33768, 0.07441}},
        {8, {0.99988, 0.99315, 0.92708, std::numbers::sqrt2 / 2, 0.37467, 0.11762, 0.01436}},
    };
    return table;
}

}  // namespace

std::vector<int> supported_overlaps() {
    std::vector<int> ks;
    for (const auto& [k, h] : sample_table()) ks.push_back(k);
    return ks;
}

rvec prototype_frequency_samples(int K) {
    for (const auto& [k, h] : sample_table()) {
        if (k == K) {
            rvec H{1.0};
            H.insert(H.end(), h.begin(), h.end());
            return H;
        }
    }
    std::ostringstream os;
    os << "unsupported overlap factor K=" << K << "; supported:";
    for (int k : supported_overlaps()) os << ' ' << k;
    throw std::invalid_argument(os.str());
}

PrototypeFilter prototype_from_samples(const rvec& H, int N) {
    const int K = static_cast<int>(H.size());
    if (K < 1 || N < 1) throw std::invalid_argument("prototype needs K >= 1 and N >= 1");
    const int L = K * N;
    PrototypeFilter w;
    w.K = K;
    w.N = N;
    w.coeffs.assign(static_cast<size_t>(L), H[0]);
    // Half-sample shift keeps the even-length response symmetric.
    for (int k = 0; k < L; ++k) {
        double v = H[0];
        for (int i = 1; i < K; ++i) {
            const double sign = (i % 2) ? -1.0 : 1.0;
            v += 2.0 * sign * H[static_cast<size_t>(i)] *
                 std::cos(2.0 * std::numbers::pi * i * (k + 0.5) / L);
        }
        w.coeffs[static_cast<size_t>(k)] = v;
    }
    double e = 0.0;
    for (double c : w.coeffs) e += c * c;
    const double s = 1.0 / std::sqrt(e);
    for (double& c : w.coeffs) c *= s;
    if (K == 1) std::fill(w.coeffs.begin(), w.coeffs.end(), 1.0 / std::sqrt(static_cast<double>(N)));
    return w;
}

PrototypeFilter design_prototype(int K, int N) {
    if (!is_pow2(N)) throw std::invalid_argument("N must be a power of two, got " + std::to_string(N));
    return prototype_from_samples(prototype_frequency_samples(K), N);
}

void validate_prototype(const PrototypeFilter& w) {
    if (w.K < 1 || w.N < 1) throw std::invalid_argument("prototype needs K >= 1 and N >= 1");
    if (w.coeffs.size() != static_cast<size_t>(w.K) * w.N)
        throw std::invalid_argument("prototype length " + std::to_string(w.coeffs.size()) +
                                    " != K*N = " + std::to_string(w.K * w.N));
    for (double c : w.coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("prototype has a non-finite coefficient");
}

PrototypeFilter load_prototype(const std::string& path, int K, int N) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prototype file " + path);
    PrototypeFilter w;
    w.K = K;
    w.N = N;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            size_t used = 0;
            double v = std::stod(line.substr(first), &used);
            w.coeffs.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": not a number");
        }
    }
    validate_prototype(w);
    double e = 0.0;
    for (double c : w.coeffs) e += c * c;
    if (e <= 0.0) throw std::invalid_argument("prototype file has zero energy");
    for (double& c : w.coeffs) c /= std::sqrt(e);
    return w;
}

namespace {

int axis_bits(int order) {
    switch (order) {
        case 4: return 1;
        case 16: return 2;
        case 64: return 3;
        default: throw std::invalid_argument("unsupported QAM order " + std::to_string(order));
    }
}

unsigned gray_decode(unsigned g) {
    unsigned b = g;
    while (g >>= 1) b ^= g;
    return b;
}

unsigned gray_encode(unsigned b) { return b ^ (b >> 1); }

double axis_scale(int order, double power) {
    return std::sqrt(power * 3.0 / (2.0 * (order - 1)));
}

// Level index k = 0 is the most positive amplitude A-1.
double level(int A, unsigned k) { return static_cast<double>(A - 1 - 2 * static_cast<int>(k)); }

unsigned nearest_label(double x, int A) {
    const double pos = (A - 1 - x) / 2.0;
    int k = static_cast<int>(std::floor(pos));
    const double frac = pos - k;
    int kk;
    if (frac > 0.5) kk = k + 1;
    else if (frac < 0.5) kk = k;
    else kk = (gray_encode(static_cast<unsigned>(std::clamp(k, 0, A - 1))) <
               gray_encode(static_cast<unsigned>(std::clamp(k + 1, 0, A - 1))))
                  ? k
                  : k + 1;
    kk = std::clamp(kk, 0, A - 1);
    return gray_encode(static_cast<unsigned>(kk));
}

}  // namespace

int qam_bits_per_symbol(int order) { return 2 * axis_bits(order); }

cvec qam_map(const std::vector<std::uint8_t>& bits, int order, double power) {
    const int ab = axis_bits(order);
    const int bps = 2 * ab;
    if (bits.size() % static_cast<size_t>(bps) != 0)
        throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                    " not divisible by " + std::to_string(bps));
    const int A = 1 << ab;
    const double s = axis_scale(order, power);
    cvec out(bits.size() / static_cast<size_t>(bps));
    for (size_t i = 0; i < out.size(); ++i) {
        unsigned gi = 0, gq = 0;
        const auto* b = &bits[i * static_cast<size_t>(bps)];
        for (int j = 0; j < ab; ++j) gi = (gi << 1) | (b[j] & 1u);
        for (int j = 0; j < ab; ++j) gq = (gq << 1) | (b[ab + j] & 1u);
        out[i] = cd(level(A, gray_decode(gi)) * s, level(A, gray_decode(gq)) * s);
    }
    return out;
}

std::vector<std::uint8_t> qam_demap(const cvec& symbols, int order, double power) {
    const int ab = axis_bits(order);
    const int A = 1 << ab;
    const double s = axis_scale(order, power);
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * 2 * static_cast<size_t>(ab));
    for (const cd& y : symbols) {
        const unsigned gi = nearest_label(y.real() / s, A);
        const unsigned gq = nearest_label(y.imag() / s, A);
        for (int j = ab - 1; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((gi >> j) & 1u));
        for (int j = ab - 1; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((gq >> j) & 1u));
    }
    return bits;
}

void qam_llr(cd y, double gain, double noiseVar, int order, double power, double* out) {
    const int ab = axis_bits(order);
    const int A = 1 << ab;
    const double s = axis_scale(order, power) * gain;
    const double var = std::max(noiseVar, 1e-300);
    for (int axis = 0; axis < 2; ++axis) {
        const double x = axis == 0 ? y.real() : y.imag();
        for (int j = 0; j < ab; ++j) {
            double d0 = std::numeric_limits<double>::infinity();
            double d1 = d0;
            for (unsigned k = 0; k < static_cast<unsigned>(A); ++k) {
                const unsigned g = gray_encode(k);
                const double d = x - level(A, k) * s;
                const double dd = d * d;
                if ((g >> (ab - 1 - j)) & 1u) d1 = std::min(d1, dd);
                else d0 = std::min(d0, dd);
            }
            // Per-axis noise variance is var/2.
            out[axis * ab + j] = (d1 - d0) / var;
        }
    }
}

cvec idft_block(const QamBlock& S) {
    cvec b = S.data;
    for (int m = 0; m < S.M; ++m) idft_inplace(b.data() + static_cast<size_t>(m) * S.N, S.N);
    return b;
}

QamBlock dft_block(const cvec& y, int N, int M) {
    if (y.size() != static_cast<size_t>(N) * M) throw std::invalid_argument("dft_block: length mismatch");
    QamBlock S(N, M);
    S.data = y;
    for (int m = 0; m < M; ++m) dft_inplace(S.data.data() + static_cast<size_t>(m) * N, N);
    return S;
}

}  // namespace fbmc
