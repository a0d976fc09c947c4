#include "fbmc/matrix.hpp"

#include <cmath>
#include <sstream>

namespace fbmc {

namespace {

void check_len(size_t got, size_t want, const char* what) {
    if (got != want) {
        std::ostringstream os;
        os << what << ": length " << got << ", expected " << want;
        throw std::invalid_argument(os.str());
    }
}

inline int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

BandedFilterMatrix build_P(const PrototypeFilter& w, int M) {
    validate_prototype(w);
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    BandedFilterMatrix P;
    P.N = w.N;
    P.M = M;
    P.K = w.K;
    const double g = std::sqrt(static_cast<double>(w.N));
    P.taps.resize(w.coeffs.size());
    for (size_t i = 0; i < w.coeffs.size(); ++i) P.taps[i] = g * w.coeffs[i];
    return P;
}

cvec apply_P(const BandedFilterMatrix& P, const cvec& b, OpCounter* ops) {
    check_len(b.size(), static_cast<size_t>(P.cols()), "apply_P");
    const int N = P.N, K = P.K;
    cvec o(static_cast<size_t>(P.rows()));
    for (int m = 0; m < P.M; ++m) {
        const cd* bm = &b[static_cast<size_t>(m) * N];
        for (int j = 0; j < K; ++j) {
            cd* out = &o[static_cast<size_t>(m + j) * N];
            const double* p = &P.taps[static_cast<size_t>(j) * N];
            for (int n = 0; n < N; ++n) out[n] += p[n] * bm[n];
        }
    }
    if (ops) ops->realMults += 2ull * P.M * N * K;
    return o;
}

cvec apply_P_adjoint(const BandedFilterMatrix& P, const cvec& r, OpCounter* ops) {
    check_len(r.size(), static_cast<size_t>(P.rows()), "apply_P_adjoint");
    const int N = P.N, K = P.K;
    cvec x(static_cast<size_t>(P.cols()));
    for (int m = 0; m < P.M; ++m) {
        cd* xm = &x[static_cast<size_t>(m) * N];
        for (int j = 0; j < K; ++j) {
            const cd* in = &r[static_cast<size_t>(m + j) * N];
            const double* p = &P.taps[static_cast<size_t>(j) * N];
            for (int n = 0; n < N; ++n) xm[n] += p[n] * in[n];
        }
    }
    if (ops) ops->realMults += 2ull * P.M * N * K;
    return x;
}

double AutocorrMatrix::entry(int m, int i, int n) const {
    const int d = std::abs(m - i);
    if (d >= K) return 0.0;
    return bands[static_cast<size_t>(d)][static_cast<size_t>(n)];
}

Eigen::MatrixXd AutocorrMatrix::subcarrier(int n) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(M, M);
    for (int m = 0; m < M; ++m)
        for (int i = std::max(0, m - K + 1); i <= std::min(M - 1, m + K - 1); ++i) g(m, i) = entry(m, i, n);
    return g;
}

AutocorrMatrix build_G(const BandedFilterMatrix& P) {
    AutocorrMatrix G;
    G.N = P.N;
    G.M = P.M;
    G.K = P.K;
    G.bands.assign(static_cast<size_t>(P.K), rvec(static_cast<size_t>(P.N), 0.0));
    for (int d = 0; d < P.K; ++d)
        for (int j = d; j < P.K; ++j)
            for (int n = 0; n < P.N; ++n)
                G.bands[static_cast<size_t>(d)][static_cast<size_t>(n)] +=
                    P.tap(j * P.N + n) * P.tap((j - d) * P.N + n);
    return G;
}

AutocorrMatrix build_G(const PrototypeFilter& w, int M) { return build_G(build_P(w, M)); }

cvec apply_G(const AutocorrMatrix& G, const cvec& x) {
    check_len(x.size(), static_cast<size_t>(G.M) * G.N, "apply_G");
    cvec y(x.size());
    for (int m = 0; m < G.M; ++m)
        for (int i = std::max(0, m - G.K + 1); i <= std::min(G.M - 1, m + G.K - 1); ++i)
            for (int n = 0; n < G.N; ++n)
                y[static_cast<size_t>(m) * G.N + n] += G.entry(m, i, n) * x[static_cast<size_t>(i) * G.N + n];
    return y;
}

std::size_t InverseFilterMatrix::nonzeros() const {
    std::size_t nnz = 0;
    for (int n = 0; n < N; ++n)
        nnz += offDiagKept[static_cast<size_t>(n)] ? static_cast<size_t>(M) * M : static_cast<size_t>(M);
    return nnz;
}

InverseFilterMatrix invert_G(const AutocorrMatrix& G) {
    InverseFilterMatrix R;
    R.N = G.N;
    R.M = G.M;
    R.perSub.resize(static_cast<size_t>(G.N));
    R.offDiagKept.assign(static_cast<size_t>(G.N), true);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(G.M, G.M);
    for (int n = 0; n < G.N; ++n) {
        const Eigen::MatrixXd g = G.subcarrier(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo > kMaxCondition) {
            std::ostringstream os;
            os << "autocorrelation system for subcarrier " << n << " is singular or ill-conditioned"
               << " (condition estimate " << (lo > 0.0 ? hi / lo : INFINITY) << ")";
            throw std::runtime_error(os.str());
        }
        Eigen::MatrixXd r = g.llt().solve(I);
        R.perSub[static_cast<size_t>(n)] = 0.5 * (r + r.transpose());
    }
    return R;
}

std::vector<bool> eta_kept_mask(int N, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0,1]");
    std::vector<bool> keep(static_cast<size_t>(N), true);
    const int lo = N / 4, hi = 3 * N / 4;
    const int region = hi - lo;
    const int dropped = std::min(region, static_cast<int>(std::ceil(eta * region - 1e-9)));
    const int kept = region - dropped;
    const int keepLo = lo + (region - kept) / 2;
    for (int n = lo; n < hi; ++n)
        keep[static_cast<size_t>(n)] = n >= keepLo && n < keepLo + kept;
    return keep;
}

InverseFilterMatrix sparsify_R(const InverseFilterMatrix& R, double eta) {
    InverseFilterMatrix S = R;
    S.eta = eta;
    const auto keep = eta_kept_mask(R.N, eta);
    for (int n = 0; n < R.N; ++n) {
        const bool k = keep[static_cast<size_t>(n)] && R.offDiagKept[static_cast<size_t>(n)];
        S.offDiagKept[static_cast<size_t>(n)] = k;
        if (k) continue;
        auto& r = S.perSub[static_cast<size_t>(n)];
        const Eigen::VectorXd d = r.diagonal();
        r.setZero();
        r.diagonal() = d;
    }
    return S;
}

cvec apply_R(const InverseFilterMatrix& R, const cvec& x, OpCounter* ops) {
    check_len(x.size(), static_cast<size_t>(R.M) * R.N, "apply_R");
    const int N = R.N, M = R.M;
    cvec v(x.size());
    std::uint64_t mults = 0;
    for (int n = 0; n < N; ++n) {
        const auto& r = R.perSub[static_cast<size_t>(n)];
        if (R.offDiagKept[static_cast<size_t>(n)]) {
            for (int m = 0; m < M; ++m) {
                cd acc = 0.0;
                for (int i = 0; i < M; ++i) acc += r(m, i) * x[static_cast<size_t>(i) * N + n];
                v[static_cast<size_t>(m) * N + n] = acc;
            }
            mults += 2ull * M * M;
        } else {
            for (int m = 0; m < M; ++m)
                v[static_cast<size_t>(m) * N + n] = r(m, m) * x[static_cast<size_t>(m) * N + n];
            mults += 2ull * M;
        }
    }
    if (ops) ops->realMults += mults;
    return v;
}

double sparsify_drop_ratio(const InverseFilterMatrix& R, double eta) {
    const auto keep = eta_kept_mask(R.N, eta);
    double worst = 0.0;
    for (int m = 0; m < R.M; ++m) {
        double peak = 0.0;
        for (int n = 0; n < R.N; ++n) peak = std::max(peak, std::abs(R.entry(m, m, n)));
        for (int i = 0; i < R.M; ++i) {
            if (i == m) continue;
            for (int n = 0; n < R.N; ++n)
                if (!keep[static_cast<size_t>(n)]) worst = std::max(worst, std::abs(R.entry(m, i, n)) / peak);
        }
    }
    return worst;
}

DisplacedFilterSummary displaced_summaries(const PrototypeFilter& w, int M, int l) {
    validate_prototype(w);
    if (l < 0 || l >= w.N) throw std::invalid_argument("delay l must satisfy 0 <= l < N");
    const int N = w.N, KN = w.K * w.N;
    const int rows = (M + w.K - 1) * N;
    DisplacedFilterSummary s;
    s.l = l;
    double T = 0.0;
    // Column (m, n'): rows mN + t, t = n' mod N; shifted tap w[t-l] against w[t].
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            for (int t = n; t < KN + l; t += N) {
                if (m * N + t >= rows) break;
                const double shifted = (t - l >= 0 && t - l < KN) ? w.coeffs[static_cast<size_t>(t - l)] : 0.0;
                const double orig = t < KN ? w.coeffs[static_cast<size_t>(t)] : 0.0;
                const double d = shifted - orig;
                T += d * d;
            }
    s.traceT = T;
    for (int k = 0; k < l; ++k) s.pcorr += w.coeffs[static_cast<size_t>(KN - 1 - k)] * w.coeffs[static_cast<size_t>(KN - 1 - k)];
    return s;
}

cvec exchange(const cvec& b, int N, int l) {
    cvec out(b.size());
    const int M = static_cast<int>(b.size()) / N;
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n)
            out[static_cast<size_t>(m) * N + n] = b[static_cast<size_t>(m) * N + mod(n - l, N)];
    return out;
}

cvec exchange_transpose(const cvec& b, int N, int l) { return exchange(b, N, -l); }

cvec apply_P_delayed(const BandedFilterMatrix& P, const cvec& b, int l) {
    const cvec o = apply_P(P, b);
    cvec d(o.size());
    for (size_t t = static_cast<size_t>(l); t < o.size(); ++t) d[t] = o[t - static_cast<size_t>(l)];
    return d;
}

cvec apply_delta_P(const BandedFilterMatrix& P, const cvec& b, int l) {
    cvec d = apply_P_delayed(P, b, l);
    const cvec c = apply_P(P, exchange(b, P.N, l));
    for (size_t t = 0; t < d.size(); ++t) d[t] -= c[t];
    return d;
}

}  // namespace fbmc
