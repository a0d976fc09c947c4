#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "fbmc/matrix.hpp"
#include "fbmc/waveform.hpp"

using namespace fbmc;

namespace {

PrototypeFilter raw_filter(const rvec& c, int K, int N) {
    PrototypeFilter w;
    w.coeffs = c;
    w.K = K;
    w.N = N;
    return w;
}

PrototypeFilter random_filter(int K, int N, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    rvec c(static_cast<size_t>(K) * N);
    for (auto& v : c) v = u(rng);
    return raw_filter(c, K, N);
}

// Dense P straight from the block definition; taps sqrt(N) w.
Eigen::MatrixXd dense_P(const PrototypeFilter& w, int M) {
    const int N = w.N, K = w.K;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero((M + K - 1) * N, M * N);
    for (int j = 0; j < M; ++j)
        for (int d = 0; d < K; ++d)
            for (int n = 0; n < N; ++n) P((j + d) * N + n, j * N + n) = std::sqrt(double(N)) * w.coeffs[d * N + n];
    return P;
}

Eigen::VectorXcd to_eigen(const cvec& v) {
    Eigen::VectorXcd e(v.size());
    for (size_t i = 0; i < v.size(); ++i) e[i] = v[i];
    return e;
}

cvec random_cvec(size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    cvec x(n);
    for (auto& v : x) v = {nd(rng), nd(rng)};
    return x;
}

// Dense X_l: out[mN+n] = b[mN + (n-l mod N)].
Eigen::MatrixXd dense_X(int N, int M, int l) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(M * N, M * N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) X(m * N + n, m * N + ((n - l) % N + N) % N) = 1.0;
    return X;
}

Eigen::MatrixXd dense_delay(int rows, int l) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, rows);
    for (int t = l; t < rows; ++t) D(t, t - l) = 1.0;
    return D;
}

}  // namespace

TEST_CASE("hand example N=1, M=2, K=2") {
    const auto w = raw_filter({1.0, 1.0}, 2, 1);
    const auto P = build_P(w, 2);
    const cvec o = apply_P(P, {cd(1, 0), cd(0, 1)});
    REQUIRE(o.size() == 3);
    CHECK(std::abs(o[0] - cd(1, 0)) < 1e-15);
    CHECK(std::abs(o[1] - cd(1, 1)) < 1e-15);
    CHECK(std::abs(o[2] - cd(0, 1)) < 1e-15);
    const auto G = build_G(w, 2);
    CHECK(G.entry(0, 0, 0) == 2.0);
    CHECK(G.entry(0, 1, 0) == 1.0);
    const auto R = invert_G(G);
    CHECK(R.entry(0, 0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(R.entry(0, 1, 0) == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("dense oracle for P, G and R on all small instances") {
    std::mt19937_64 rng(11);
    for (int N : {1, 2, 4, 8})
        for (int M = 1; M <= 4; ++M)
            for (int K = 1; K <= 4; ++K) {
                CAPTURE(N);
                CAPTURE(M);
                CAPTURE(K);
                const auto w = random_filter(K, N, rng);
                const Eigen::MatrixXd Pd = dense_P(w, M);
                const auto P = build_P(w, M);
                REQUIRE(P.rows() == Pd.rows());
                double errP = 0.0;
                for (int c = 0; c < M * N; ++c) {
                    cvec e(static_cast<size_t>(M) * N);
                    e[c] = 1.0;
                    const cvec col = apply_P(P, e);
                    for (int r = 0; r < Pd.rows(); ++r) errP = std::max(errP, std::abs(col[r] - Pd(r, c)));
                }
                CHECK(errP < 1e-10);

                const Eigen::MatrixXd Gd = Pd.transpose() * Pd;
                const Eigen::MatrixXd Rd = Gd.inverse();
                const auto G = build_G(w, M);
                const auto G2 = build_G(P);
                const auto R = invert_G(G);
                double errG = 0.0, errG2 = 0.0, errR = 0.0;
                for (int a = 0; a < M * N; ++a)
                    for (int b = 0; b < M * N; ++b) {
                        const int m = a / N, n = a % N, i = b / N, k = b % N;
                        const double g = n == k ? G.entry(m, i, n) : 0.0;
                        const double g2 = n == k ? G2.entry(m, i, n) : 0.0;
                        const double r = n == k ? R.entry(m, i, n) : 0.0;
                        errG = std::max(errG, std::abs(g - Gd(a, b)));
                        errG2 = std::max(errG2, std::abs(g2 - Gd(a, b)));
                        errR = std::max(errR, std::abs(r - Rd(a, b)));
                    }
                CHECK(errG < 1e-10);
                CHECK(errG2 < 1e-10);
                CHECK(errR < 1e-10);

                const cvec x = random_cvec(static_cast<size_t>(M) * N, rng);
                const Eigen::VectorXcd gx = Gd.cast<cd>() * to_eigen(x);
                const cvec gxb = apply_G(G, x);
                for (int t = 0; t < M * N; ++t) CHECK(std::abs(gxb[t] - gx[t]) < 1e-10);
            }
}

TEST_CASE("rectangular filter gives identities") {
    for (int M : {1, 3, 14}) {
        const auto w = design_prototype(1, 16);
        const auto G = build_G(w, M);
        const auto R = invert_G(G);
        for (int n = 0; n < 16; ++n)
            for (int m = 0; m < M; ++m)
                for (int i = 0; i < M; ++i) {
                    CHECK(std::abs(G.entry(m, i, n) - (m == i ? 1.0 : 0.0)) < 1e-12);
                    CHECK(std::abs(R.entry(m, i, n) - (m == i ? 1.0 : 0.0)) < 1e-12);
                }
    }
}

TEST_CASE("adjoint and quadratic form") {
    std::mt19937_64 rng(12);
    const auto w = design_prototype(4, 8);
    const auto P = build_P(w, 3);
    const auto G = build_G(w, 3);
    const cvec b = random_cvec(24, rng), r = random_cvec(static_cast<size_t>(P.rows()), rng);
    const cvec Pb = apply_P(P, b), Phr = apply_P_adjoint(P, r);
    cd lhs = 0.0, rhs = 0.0;
    for (size_t t = 0; t < Pb.size(); ++t) lhs += std::conj(r[t]) * Pb[t];
    for (size_t t = 0; t < b.size(); ++t) rhs += std::conj(Phr[t]) * b[t];
    CHECK(std::abs(lhs - rhs) < 1e-10);
    double e = 0.0;
    for (auto& v : Pb) e += std::norm(v);
    const cvec Gb = apply_G(G, b);
    cd q = 0.0;
    for (size_t t = 0; t < b.size(); ++t) q += std::conj(b[t]) * Gb[t];
    CHECK(std::abs(e - q.real()) < 1e-10 * e);
    CHECK(std::abs(q.imag()) < 1e-10);
    for (auto& v : apply_P(P, cvec(24))) CHECK(v == cd(0.0));
}

TEST_CASE("P equals overlap-add of periodically extended windowed symbols") {
    std::mt19937_64 rng(13);
    const int N = 4, M = 3, K = 2;
    const auto w = design_prototype(K, N);
    const auto P = build_P(w, M);
    const cvec b = random_cvec(M * N, rng);
    cvec ref(static_cast<size_t>((M + K - 1) * N));
    for (int m = 0; m < M; ++m)
        for (int t = 0; t < K * N; ++t) ref[m * N + t] += std::sqrt(double(N)) * w.coeffs[t] * b[m * N + t % N];
    const cvec o = apply_P(P, b);
    for (size_t t = 0; t < o.size(); ++t) CHECK(std::abs(o[t] - ref[t]) < 1e-12);
}

TEST_CASE("inverse exactness for larger systems") {
    for (auto [N, M, K] : {std::tuple{16, 6, 4}, std::tuple{16, 4, 4}, std::tuple{64, 14, 5}}) {
        const auto G = build_G(design_prototype(K, N), M);
        const auto R = invert_G(G);
        double err = 0.0;
        for (int n = 0; n < N; ++n) {
            const Eigen::MatrixXd I = R.perSub[n] * G.subcarrier(n);
            err = std::max(err, (I - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff());
        }
        CHECK(err < 1e-9);
        std::mt19937_64 rng(14);
        const cvec x = random_cvec(static_cast<size_t>(M) * N, rng);
        const cvec back = apply_R(R, apply_G(G, x));
        for (size_t t = 0; t < x.size(); ++t) CHECK(std::abs(back[t] - x[t]) < 1e-9);
    }
}

TEST_CASE("singular autocorrelation names the subcarrier") {
    // Both polyphase samples at n=3 are zero, so the subcarrier-3 system vanishes.
    rvec c(16, 0.5);
    c[3] = 0.0;
    c[11] = 0.0;
    const auto w = raw_filter(c, 2, 8);
    try {
        invert_G(build_G(w, 3));
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("subcarrier 3") != std::string::npos);
    }
}

TEST_CASE("eta sparsification mask") {
    auto zeroed = [](int N, double eta) {
        std::vector<int> z;
        const auto keep = eta_kept_mask(N, eta);
        for (int n = 0; n < N; ++n)
            if (!keep[n]) z.push_back(n);
        return z;
    };
    CHECK(zeroed(8, 0.0).empty());
    CHECK(zeroed(8, 1.0) == std::vector<int>{2, 3, 4, 5});
    std::vector<int> expect;
    for (int n = 16; n < 48; ++n)
        if (n < 24 || n >= 40) expect.push_back(n);
    CHECK(zeroed(64, 0.5) == expect);
    CHECK_THROWS(eta_kept_mask(8, 1.5));
    CHECK_THROWS(eta_kept_mask(8, -0.1));

    const auto R = invert_G(build_G(design_prototype(5, 64), 14));
    const auto R0 = sparsify_R(R, 0.0);
    for (int n = 0; n < 64; ++n) CHECK((R0.perSub[n] - R.perSub[n]).cwiseAbs().maxCoeff() == 0.0);
    const auto R1 = sparsify_R(R, 1.0);
    for (int n = 16; n < 48; ++n)
        for (int m = 0; m < 14; ++m) {
            CHECK(R1.entry(m, m, n) == R.entry(m, m, n));
            for (int i = 0; i < 14; ++i)
                if (i != m) CHECK(R1.entry(m, i, n) == 0.0);
        }
    CHECK(R1.nonzeros() == 14u * 64u + 14u * 13u * 32u);
    // Largest dropped element relative to the main-diagonal peak, frozen for the default filter.
    CHECK(sparsify_drop_ratio(R, 1.0) == doctest::Approx(0.0782).epsilon(0.01));
    CHECK(sparsify_drop_ratio(R, 0.0) == 0.0);
}

TEST_CASE("apply_R edge cases and operation count") {
    std::mt19937_64 rng(15);
    const auto G = build_G(design_prototype(1, 8), 4);
    const auto I = invert_G(G);
    const cvec x = random_cvec(32, rng);
    const cvec y = apply_R(I, x);
    for (size_t t = 0; t < x.size(); ++t) CHECK(std::abs(x[t] - y[t]) < 1e-14);
    for (auto& v : apply_R(I, cvec(32))) CHECK(v == cd(0.0));

    const auto P = build_P(design_prototype(5, 64), 14);
    OpCounter ops;
    apply_P(P, cvec(static_cast<size_t>(14 * 64)), &ops);
    CHECK(ops.realMults == 2u * 14u * 64u * 5u);
    const auto R = invert_G(build_G(design_prototype(5, 64), 14));
    OpCounter r0, r1;
    apply_R(R, cvec(896), &r0);
    apply_R(sparsify_R(R, 1.0), cvec(896), &r1);
    CHECK(r0.realMults == 2u * 14u * 14u * 64u);
    CHECK(r1.realMults == 2u * 14u * 14u * 32u + 2u * 14u * 32u);
}

TEST_CASE("displaced filter summaries") {
    const auto w = design_prototype(4, 16);
    const auto s0 = displaced_summaries(w, 6, 0);
    CHECK(s0.traceT == 0.0);
    CHECK(s0.pcorr == 0.0);
    const auto s1 = displaced_summaries(w, 6, 1);
    CHECK(s1.pcorr == doctest::Approx(w.coeffs.back() * w.coeffs.back()).epsilon(1e-12));
    CHECK_THROWS(displaced_summaries(w, 6, 16));

    // Dense trace: dP = D_l P X_l^T - P, reported per unit-energy w (divide by N).
    std::mt19937_64 rng(16);
    for (int l = 1; l < 4; ++l) {
        const int N = 4, M = 2, K = 2;
        const auto wr = random_filter(K, N, rng);
        const Eigen::MatrixXd P = dense_P(wr, M);
        const Eigen::MatrixXd dP = dense_delay(P.rows(), l) * P * dense_X(N, M, l).transpose() - P;
        const double T = (dP * dP.transpose()).trace() / N;
        CHECK(displaced_summaries(wr, M, l).traceT == doctest::Approx(T).epsilon(1e-12));

        const auto Pb = build_P(wr, M);
        const cvec b = random_cvec(M * N, rng);
        const Eigen::VectorXcd ref = dP.cast<cd>() * (dense_X(N, M, l).cast<cd>() * to_eigen(b));
        const cvec got = apply_delta_P(Pb, b, l);
        for (int t = 0; t < P.rows(); ++t) CHECK(std::abs(got[t] - ref[t]) < 1e-12);
        const Eigen::VectorXcd del = dense_delay(P.rows(), l).cast<cd>() * P.cast<cd>() * to_eigen(b);
        const cvec gd = apply_P_delayed(Pb, b, l);
        for (int t = 0; t < P.rows(); ++t) CHECK(std::abs(gd[t] - del[t]) < 1e-12);
    }
}

TEST_CASE("exchange round trip") {
    std::mt19937_64 rng(17);
    const cvec b = random_cvec(24, rng);
    for (int l = 0; l < 8; ++l) {
        const cvec back = exchange_transpose(exchange(b, 8, l), 8, l);
        for (size_t t = 0; t < b.size(); ++t) CHECK(back[t] == b[t]);
    }
    const cvec e = exchange(b, 8, 1);
    CHECK(e[1] == b[0]);
    CHECK(e[0] == b[7]);
}
