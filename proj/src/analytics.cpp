#include "fbmc/analytics.hpp"

#include <cmath>

#include "fbmc/fft.hpp"

namespace fbmc {

namespace {

inline size_t idx(int m, int n, int N) { return static_cast<size_t>(m) * N + n; }

// Segment-wise circular convolution with h: sum_l h_l X_l b.
cvec circular_channel(const cvec& b, const cvec& h, int N) {
    cvec out(b.size());
    const int M = static_cast<int>(b.size()) / N;
    for (int m = 0; m < M; ++m)
        for (size_t l = 0; l < h.size(); ++l) {
            if (h[l] == cd(0.0)) continue;
            for (int n = 0; n < N; ++n)
                out[idx(m, n, N)] += h[l] * b[idx(m, ((n - static_cast<int>(l)) % N + N) % N, N)];
        }
    return out;
}

// Diagonal of F Rx G Rx^T F^H for symbol m (Rx = null means P^H only).
double noise_gain(const InverseFilterMatrix* Rx, const AutocorrMatrix& G, int m) {
    double acc = 0.0;
    for (int u = 0; u < G.N; ++u) {
        if (!Rx) {
            acc += G.entry(m, m, u);
            continue;
        }
        const auto& r = Rx->perSub[static_cast<size_t>(u)];
        const Eigen::MatrixXd g = G.subcarrier(u);
        acc += (r.row(m) * g * r.row(m).transpose())(0, 0);
    }
    return acc / G.N;
}

}  // namespace

std::string to_string(Fidelity f) { return f == Fidelity::Scalar ? "scalar" : "exact"; }

Fidelity parse_fidelity(const std::string& s) {
    if (s == "scalar") return Fidelity::Scalar;
    if (s == "exact") return Fidelity::Exact;
    throw std::invalid_argument("fidelity must be scalar or exact, got '" + s + "'");
}

cd InterferenceCoeffs::Q(int i, int n, int k) const {
    const int d = std::abs(i - m);
    if (d >= static_cast<int>(q.size())) return 0.0;
    return q[static_cast<size_t>(d)][static_cast<size_t>(((n - k) % N + N) % N)];
}

InterferenceCoeffs compute_interference_coeffs(const AutocorrMatrix& G, int m) {
    if (m < 0 || m >= G.M) throw std::invalid_argument("reference symbol out of range");
    InterferenceCoeffs c;
    c.N = G.N;
    c.M = G.M;
    c.m = m;
    const double s = 1.0 / std::sqrt(static_cast<double>(G.N));
    for (int d = 0; d < G.K; ++d) {
        cvec band(G.bands[static_cast<size_t>(d)].begin(), G.bands[static_cast<size_t>(d)].end());
        cvec qd = dft_segment(band);
        for (auto& v : qd) v *= s;
        c.q.push_back(std::move(qd));
    }
    // Circulant rows share one magnitude profile, so both alphas are flat in n.
    double ici = 0.0;
    for (int j = 1; j < G.N; ++j) ici += std::norm(c.q[0][static_cast<size_t>(j)]);
    ici += std::norm(c.q[0][0] - 1.0);
    double isi = 0.0;
    for (int i = std::max(0, m - G.K + 1); i <= std::min(G.M - 1, m + G.K - 1); ++i) {
        if (i == m) continue;
        for (int j = 0; j < G.N; ++j) isi += std::norm(c.q[static_cast<size_t>(std::abs(i - m))][static_cast<size_t>(j)]);
    }
    c.alphaICI.assign(static_cast<size_t>(G.N), ici);
    c.alphaISI.assign(static_cast<size_t>(G.N), isi);
    return c;
}

rvec compute_zeta(const InverseFilterMatrix& R, const AutocorrMatrix& G, int m) {
    if (m < 0 || m >= G.M) throw std::invalid_argument("reference symbol out of range");
    return rvec(static_cast<size_t>(G.N), noise_gain(&R, G, m));
}

double zeta_block_average(const InverseFilterMatrix& R, const AutocorrMatrix& G) {
    double acc = 0.0;
    for (int m = 0; m < G.M; ++m) acc += noise_gain(&R, G, m);
    return acc / G.M;
}

double MseBreakdown::total(int m, int n) const {
    const size_t i = idx(m, n, N);
    return resd[i] + ici[i] + isi[i] + rii[i] + fd[i] + ibi[i] + noise[i];
}

double MseBreakdown::sinr(int m, int n, double delta2) const { return delta2 / total(m, n); }

double MseBreakdown::mean(const rvec& v) const {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double MseBreakdown::mean_total() const {
    double s = 0.0;
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) s += total(m, n);
    return s / (static_cast<double>(M) * N);
}

double MseBreakdown::mean_joint() const { return mean(joint); }

MseBreakdown mse_closed_form(ReceiverMode mode, const MseInputs& in, Fidelity fidelity) {
    if (!in.P || !in.G || !in.w) throw std::invalid_argument("mse_closed_form: P, G and w are required");
    const auto& P = *in.P;
    const auto& G = *in.G;
    const int N = P.N, M = P.M;
    if (mode == ReceiverMode::IF && !in.R) throw std::invalid_argument("mse_closed_form: IF mode needs R");
    if (in.channel.C.size() != static_cast<size_t>(N) || in.eq.E.size() != static_cast<size_t>(N))
        throw std::invalid_argument("mse_closed_form: channel/equalizer length must be N");
    const InverseFilterMatrix* Rrx = mode == ReceiverMode::IF ? (in.Rrx ? in.Rrx : in.R) : nullptr;
    const double d2 = in.delta2;
    const size_t MN = static_cast<size_t>(M) * N;

    MseBreakdown out;
    out.N = N;
    out.M = M;
    out.mode = mode;
    for (rvec* v : {&out.resd, &out.ici, &out.isi, &out.rii, &out.fd, &out.ibi, &out.ibiApprox, &out.noise,
                    &out.zeta, &out.joint})
        v->assign(MN, 0.0);

    rvec E2(static_cast<size_t>(N)), C2(static_cast<size_t>(N));
    for (int n = 0; n < N; ++n) {
        E2[static_cast<size_t>(n)] = std::norm(in.eq.E[static_cast<size_t>(n)]);
        C2[static_cast<size_t>(n)] = std::norm(in.channel.C[static_cast<size_t>(n)]);
    }

    // Scalar trace summaries (unit-energy filter units).
    double alphaFd = 0.0, alphaIbi = 0.0, ibiTrace = 0.0;
    const int L = in.pdp.length();
    for (int l = 0; l < L && l < N; ++l) {
        const auto s = displaced_summaries(*in.w, M, l);
        const double r2 = in.pdp.rho2[static_cast<size_t>(l)];
        alphaFd += d2 * r2 * s.traceT;
        alphaIbi += d2 * r2 * s.pcorr;
        // Trace of the outer product of the last l rows of P.
        double tr = 0.0;
        const int rows = P.rows(), KN = P.K * N;
        for (int row = rows - l; row < rows; ++row)
            for (int m = 0; m < M; ++m) {
                const int t = row - m * N;
                if (t >= 0 && t < KN) tr += in.w->coeffs[static_cast<size_t>(t)] * in.w->coeffs[static_cast<size_t>(t)];
            }
        ibiTrace += d2 * r2 * tr;
    }

    for (int m = 0; m < M; ++m) {
        const double zetaScalar = mode == ReceiverMode::IF ? noise_gain(in.R, G, m) : 1.0;
        const double gain = noise_gain(Rrx, G, m);
        const double z = fidelity == Fidelity::Scalar ? zetaScalar : gain;
        InterferenceCoeffs ic;
        if (mode == ReceiverMode::NIF && fidelity == Fidelity::Scalar) ic = compute_interference_coeffs(G, m);
        for (int n = 0; n < N; ++n) {
            const size_t i = idx(m, n, N);
            const double b = in.eq.beta[static_cast<size_t>(n)];
            out.resd[i] = d2 * (1.0 - b) * (1.0 - b);
            out.zeta[i] = z;
            out.noise[i] = in.sigma2 * E2[static_cast<size_t>(n)] * (fidelity == Fidelity::Scalar ? zetaScalar : gain);
            if (!in.guard) out.ibiApprox[i] = E2[static_cast<size_t>(n)] * alphaIbi * zetaScalar;
            if (fidelity == Fidelity::Scalar) {
                if (mode == ReceiverMode::NIF) {
                    out.ici[i] = d2 * E2[static_cast<size_t>(n)] * C2[static_cast<size_t>(n)] * ic.alphaICI[static_cast<size_t>(n)];
                    out.isi[i] = d2 * E2[static_cast<size_t>(n)] * C2[static_cast<size_t>(n)] * ic.alphaISI[static_cast<size_t>(n)];
                }
                out.fd[i] = E2[static_cast<size_t>(n)] * alphaFd * zetaScalar;
                if (!in.guard) out.ibi[i] = E2[static_cast<size_t>(n)] * ibiTrace * zetaScalar;
            }
        }
    }

    if (fidelity == Fidelity::Scalar) {
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n) out.joint[idx(m, n, N)] = out.total(m, n);
        return out;
    }

    // Exact: propagate every unit input symbol through the actual chains.
    const cvec& h = in.channel.taps;
    const int rows = P.rows();
    auto chain = [&](const cvec& r) {
        cvec x = apply_P_adjoint(P, r);
        if (Rrx) x = apply_R(*Rrx, x);
        return dft_block(x, N, M);
    };
    std::vector<cd> jointErr;
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < N; ++k) {
            QamBlock S(N, M);
            S.at(k, i) = 1.0;
            const cvec b = idft_block(S);
            const cvec o = apply_P(P, b);
            const cvec ocirc = apply_P(P, circular_channel(b, h, N));
            const QamBlock yMain = chain(ocirc);
            // Distortion sum_l h_l (P^{down l} - P X_l) b, built so that L=1 gives exactly zero.
            cvec dist(static_cast<size_t>(rows));
            for (int l = 1; l < static_cast<int>(h.size()); ++l) {
                if (h[static_cast<size_t>(l)] == cd(0.0)) continue;
                const cvec px = apply_P(P, exchange(b, N, l));
                for (int t = 0; t < rows; ++t) {
                    const cd delayed = t >= l ? o[static_cast<size_t>(t - l)] : cd(0.0);
                    dist[static_cast<size_t>(t)] += h[static_cast<size_t>(l)] * (delayed - px[static_cast<size_t>(t)]);
                }
            }
            const QamBlock yDist = chain(dist);
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < N; ++n) {
                    const size_t t = idx(m, n, N);
                    const cd E = in.eq.E[static_cast<size_t>(n)];
                    const cd main = yMain.at(n, m);
                    const cd full = main + yDist.at(n, m);
                    const bool self = (m == i && n == k);
                    const cd intrinsic = self ? E * (main - in.channel.C[static_cast<size_t>(n)]) : E * main;
                    const double pi = d2 * std::norm(intrinsic);
                    if (mode == ReceiverMode::NIF) (m == i ? out.ici[t] : out.isi[t]) += pi;
                    else out.rii[t] += pi;
                    out.fd[t] += d2 * std::norm(E * yDist.at(n, m));
                    out.joint[t] += d2 * std::norm(E * full - (self ? 1.0 : 0.0));
                }
            if (!in.guard && L > 1) {
                // This symbol as part of the previous block: only its tail reaches the current window.
                const cvec tail(o.end() - std::min<long>(L - 1, rows), o.end());
                bool any = false;
                for (const auto& v : tail) any = any || std::abs(v) > 0.0;
                if (!any) continue;
                const QamBlock yIbi = chain(apply_channel(cvec(static_cast<size_t>(rows)), h, tail));
                for (int m = 0; m < M; ++m)
                    for (int n = 0; n < N; ++n) {
                        const double v = d2 * std::norm(in.eq.E[static_cast<size_t>(n)] * yIbi.at(n, m));
                        out.ibi[idx(m, n, N)] += v;
                        out.joint[idx(m, n, N)] += v;
                    }
            }
        }
    for (size_t t = 0; t < MN; ++t) out.joint[t] += out.noise[t];
    return out;
}

double DistortionGram::variance(int m, int n, const cvec& h) const {
    const auto& g = S[idx(m, n, N)];
    cd acc = 0.0;
    const int l = std::min<int>(L, static_cast<int>(h.size()));
    for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) acc += h[static_cast<size_t>(a)] * std::conj(h[static_cast<size_t>(b)]) * g(a, b);
    return std::max(0.0, acc.real());
}

DistortionGram distortion_gram(const BandedFilterMatrix& P, const InverseFilterMatrix* Rrx, int L) {
    const int N = P.N, M = P.M;
    if (L < 1 || L > N) throw std::invalid_argument("distortion_gram: need 1 <= L <= N");
    DistortionGram out;
    out.N = N;
    out.M = M;
    out.L = L;
    out.S.assign(static_cast<size_t>(M) * N, Eigen::MatrixXcd::Zero(L, L));
    std::vector<cvec> v(static_cast<size_t>(L));
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < N; ++k) {
            QamBlock S(N, M);
            S.at(k, i) = 1.0;
            const cvec b = idft_block(S);
            for (int l = 1; l < L; ++l) {
                cvec x = apply_P_adjoint(P, apply_delta_P(P, b, l));
                if (Rrx) x = apply_R(*Rrx, x);
                v[static_cast<size_t>(l)] = dft_block(x, N, M).data;
            }
            for (size_t t = 0; t < out.S.size(); ++t) {
                auto& g = out.S[t];
                for (int a = 1; a < L; ++a) {
                    const cd va = v[static_cast<size_t>(a)][t];
                    for (int c = 1; c < L; ++c) g(a, c) += va * std::conj(v[static_cast<size_t>(c)][t]);
                }
            }
        }
    return out;
}

ComplexityReport complexity_report(int N, int M, int K, double eta) {
    if (!is_pow2(N) || M < 1 || K < 1) throw std::invalid_argument("complexity_report: invalid (N, M, K)");
    ComplexityReport c;
    const long lg = static_cast<long>(std::lround(std::log2(static_cast<double>(N))));
    c.cTx = N * lg + (2L * K - 3) * N + 4;
    c.cRxNIF = N * lg + (2L * K + 1) * N + 4;
    c.cR = 2.0 * M * N - eta * N * (M - 1);
    c.cRxIF = static_cast<double>(c.cRxNIF) + c.cR;

    BandedFilterMatrix P;
    P.N = N;
    P.M = M;
    P.K = K;
    P.taps.assign(static_cast<size_t>(K) * N, 1.0);
    OpCounter tx;
    apply_P(P, cvec(static_cast<size_t>(M) * N, 1.0), &tx);
    c.countedApplyP = tx.realMults;
    c.countedTxPerSymbol = static_cast<double>(tx.realMults) / M;

    InverseFilterMatrix R;
    R.N = N;
    R.M = M;
    R.perSub.assign(static_cast<size_t>(N), Eigen::MatrixXd::Ones(M, M));
    R.offDiagKept.assign(static_cast<size_t>(N), true);
    R = sparsify_R(R, eta);
    OpCounter rx;
    apply_R(R, cvec(static_cast<size_t>(M) * N, 1.0), &rx);
    c.countedRPerSymbol = static_cast<double>(rx.realMults) / M;
    c.cRMask = 2.0 * static_cast<double>(R.nonzeros()) / M;
    c.bigO = "NIF O(N log N + KN); IF O(N log N + (K+M)N)";
    return c;
}

}  // namespace fbmc
