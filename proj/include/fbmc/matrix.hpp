#pragma once

#include <Eigen/Dense>

#include "fbmc/types.hpp"
#include "fbmc/waveform.hpp"

namespace fbmc {

// Banded P of shape (M+K-1)N x MN. Block (i,j) is diag(taps[(i-j)N .. (i-j)N+N-1]).
// taps = sqrt(N) * w, so every column has unit energy and K=1 gives P^T P = I.
struct BandedFilterMatrix {
    int N = 0, M = 0, K = 0;
    rvec taps;

    int rows() const { return (M + K - 1) * N; }
    int cols() const { return M * N; }
    double tap(int i) const { return taps[static_cast<size_t>(i)]; }
};

BandedFilterMatrix build_P(const PrototypeFilter& w, int M);
cvec apply_P(const BandedFilterMatrix& P, const cvec& b, OpCounter* ops = nullptr);
cvec apply_P_adjoint(const BandedFilterMatrix& P, const cvec& r, OpCounter* ops = nullptr);

// G = P^T P. bands[d][n] is the diagonal of block (m, m+d), d = 0..K-1.
struct AutocorrMatrix {
    int N = 0, M = 0, K = 0;
    std::vector<rvec> bands;

    double entry(int m, int i, int n) const;
    Eigen::MatrixXd subcarrier(int n) const;  // M x M system for subcarrier n
};

AutocorrMatrix build_G(const PrototypeFilter& w, int M);
AutocorrMatrix build_G(const BandedFilterMatrix& P);
cvec apply_G(const AutocorrMatrix& G, const cvec& x);

// R decoupled per subcarrier: perSub[n](m,i) is element n of block (m,i).
struct InverseFilterMatrix {
    int N = 0, M = 0;
    double eta = 0.0;
    std::vector<Eigen::MatrixXd> perSub;
    std::vector<bool> offDiagKept;  // per n; false where off-diagonal blocks are zeroed

    double entry(int m, int i, int n) const { return perSub[static_cast<size_t>(n)](m, i); }
    std::size_t nonzeros() const;
};

constexpr double kMaxCondition = 1e12;

InverseFilterMatrix invert_G(const AutocorrMatrix& G);

// Indices n of an off-diagonal block that survive sparsification.
std::vector<bool> eta_kept_mask(int N, double eta);
InverseFilterMatrix sparsify_R(const InverseFilterMatrix& R, double eta);
cvec apply_R(const InverseFilterMatrix& R, const cvec& x, OpCounter* ops = nullptr);

// Largest |dropped element| / main-diagonal peak over all off-diagonal blocks for a given eta.
double sparsify_drop_ratio(const InverseFilterMatrix& R, double eta);

struct DisplacedFilterSummary {
    int l = 0;
    double traceT = 0.0;  // Tr(dP dP^H), unit-energy w units
    double pcorr = 0.0;   // sum_{k<l} w^2_{KN-1-k}
};

DisplacedFilterSummary displaced_summaries(const PrototypeFilter& w, int M, int l);

// Cyclic index rotation inside every N-segment: out[mN+n] = b[mN + (n-l mod N)].
cvec exchange(const cvec& b, int N, int l);
cvec exchange_transpose(const cvec& b, int N, int l);

// P^{down l} b: P b delayed by l samples, truncated to (M+K-1)N.
cvec apply_P_delayed(const BandedFilterMatrix& P, const cvec& b, int l);
// dP^{down l} b_e, i.e. P^{down l} b - P X_l b.
cvec apply_delta_P(const BandedFilterMatrix& P, const cvec& b, int l);

}  // namespace fbmc
