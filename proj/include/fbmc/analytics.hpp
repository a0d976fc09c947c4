#pragma once

#include <string>

#include "fbmc/channel.hpp"
#include "fbmc/matrix.hpp"
#include "fbmc/transceiver.hpp"

namespace fbmc {

// Q_{m,i} = F diag(band(|m-i|)) F^H is circulant: Q[n][k] = q[|m-i|][(n-k) mod N].
struct InterferenceCoeffs {
    int N = 0, M = 0, m = 0;
    std::vector<cvec> q;  // q[d], d = 0..K-1
    rvec alphaICI;        // per n
    rvec alphaISI;        // per n, for reference symbol m

    cd Q(int i, int n, int k) const;
};

InterferenceCoeffs compute_interference_coeffs(const AutocorrMatrix& G, int m);

// zeta_{m,n} = diag of F R_m P_m^H P_m R_m^H F^H, constant over n.
rvec compute_zeta(const InverseFilterMatrix& R, const AutocorrMatrix& G, int m);

double zeta_block_average(const InverseFilterMatrix& R, const AutocorrMatrix& G);

// scalar: trace reductions (alpha_fd, alpha_IBI times |E_n|^2, times zeta in IF).
// exact: traces evaluated for the given channel realization.
enum class Fidelity { Scalar, Exact };
std::string to_string(Fidelity f);
Fidelity parse_fidelity(const std::string& s);

struct MseBreakdown {
    int N = 0, M = 0;
    ReceiverMode mode = ReceiverMode::NIF;
    // all linear, index [m*N+n]
    rvec resd, ici, isi, rii, fd, ibi, ibiApprox, noise, zeta;
    // Coherent sum of all error terms (exact fidelity); equals the component sum in scalar fidelity.
    rvec joint;

    double total(int m, int n) const;
    double sinr(int m, int n, double delta2) const;
    double mean(const rvec& v) const;
    double mean_total() const;
    double mean_joint() const;
};

struct MseInputs {
    const BandedFilterMatrix* P = nullptr;
    const AutocorrMatrix* G = nullptr;
    const InverseFilterMatrix* R = nullptr;     // exact R, required in IF mode
    const InverseFilterMatrix* Rrx = nullptr;   // R applied at the receiver; defaults to R
    const PrototypeFilter* w = nullptr;
    ChannelRealization channel;
    PowerDelayProfile pdp;
    Equalizer eq;
    double delta2 = 1.0;
    double sigma2 = 0.0;
    bool guard = true;
};

MseBreakdown mse_closed_form(ReceiverMode mode, const MseInputs& in, Fidelity fidelity);

// Filter distortion is linear in the taps: at (m,n) it has variance
// delta2 |E_n|^2 sum_{l,l'} h_l conj(h_l') S[l,l'] for unit-power symbols.
struct DistortionGram {
    int N = 0, M = 0, L = 0;
    std::vector<Eigen::MatrixXcd> S;  // index m*N + n, L x L

    double variance(int m, int n, const cvec& h) const;
};

DistortionGram distortion_gram(const BandedFilterMatrix& P, const InverseFilterMatrix* Rrx, int L);

struct ComplexityReport {
    long cTx = 0, cRxNIF = 0;
    double cR = 0.0, cRxIF = 0.0;
    double cRMask = 0.0;             // 2 nnz(R_eta) / M
    double countedTxPerSymbol = 0.0; // instrumented apply_P multiplications / M
    double countedRPerSymbol = 0.0;  // instrumented apply_R multiplications / M
    std::uint64_t countedApplyP = 0; // per block
    std::string bigO;
};

ComplexityReport complexity_report(int N, int M, int K, double eta);

}  // namespace fbmc
