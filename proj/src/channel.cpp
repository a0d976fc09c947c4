#include "fbmc/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fbmc/fft.hpp"

namespace fbmc {

std::vector<std::string> PowerDelayProfile::violations(int N) const {
    std::vector<std::string> v;
    if (rho2.empty()) v.push_back("pdp: at least one tap required");
    double s = 0.0;
    for (size_t l = 0; l < rho2.size(); ++l) {
        if (!(rho2[l] >= 0.0) || !std::isfinite(rho2[l]))
            v.push_back("pdp: tap " + std::to_string(l) + " power must be finite and >= 0");
        s += rho2[l];
    }
    if (!rho2.empty() && std::abs(s - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "pdp: tap powers sum to " << s << ", expected 1";
        v.push_back(os.str());
    }
    if (N > 0 && length() >= N) v.push_back("pdp: length L=" + std::to_string(length()) + " must be < N");
    return v;
}

void PowerDelayProfile::validate(int N) const {
    auto v = violations(N);
    if (!v.empty()) throw ConfigError(v);
}

PowerDelayProfile exponential_pdp(int L, double lastTapDb) {
    if (L < 1) throw std::invalid_argument("pdp length must be >= 1");
    PowerDelayProfile p;
    p.rho2.resize(static_cast<size_t>(L));
    double s = 0.0;
    for (int l = 0; l < L; ++l) {
        const double db = L > 1 ? lastTapDb * l / (L - 1) : 0.0;
        p.rho2[static_cast<size_t>(l)] = std::pow(10.0, db / 10.0);
        s += p.rho2[static_cast<size_t>(l)];
    }
    for (double& r : p.rho2) r /= s;
    return p;
}

PowerDelayProfile default_pdp() { return exponential_pdp(8, -20.0); }

PowerDelayProfile load_pdp(const std::string& path, bool autoNormalize) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pdp file " + path);
    PowerDelayProfile p;
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
            throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": expected `l,rho2`");
        }
        int l;
        double r;
        try {
            l = std::stoi(a);
            r = std::stod(b);
        } catch (const std::exception&) {
            if (lineNo == 1) continue;  // header row
            throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": expected `l,rho2`");
        }
        if (l < 0) throw std::runtime_error(path + ":" + std::to_string(lineNo) + ": negative delay");
        if (p.rho2.size() <= static_cast<size_t>(l)) p.rho2.resize(static_cast<size_t>(l) + 1, 0.0);
        p.rho2[static_cast<size_t>(l)] = r;
    }
    if (autoNormalize) {
        double s = 0.0;
        for (double r : p.rho2) s += r;
        if (s > 0.0)
            for (double& r : p.rho2) r /= s;
    }
    p.validate();
    return p;
}

cvec freq_response(const cvec& h, int N) {
    if (static_cast<int>(h.size()) > N) throw std::invalid_argument("freq_response: L > N");
    cvec x(static_cast<size_t>(N));
    std::copy(h.begin(), h.end(), x.begin());
    dft_inplace(x.data(), N);
    const double s = std::sqrt(static_cast<double>(N));
    for (auto& c : x) c *= s;
    return x;
}

cd complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

ChannelRealization fixed_channel(const cvec& h, int N) {
    ChannelRealization c;
    c.taps = h;
    c.C = freq_response(h, N);
    return c;
}

ChannelRealization draw_channel(const PowerDelayProfile& pdp, int N, Rng& rng) {
    cvec h(pdp.rho2.size());
    for (size_t l = 0; l < h.size(); ++l) h[l] = complex_gaussian(rng, pdp.rho2[l]);
    return fixed_channel(h, N);
}

cvec convolve_full(const cvec& o, const cvec& h) {
    if (o.empty() || h.empty()) return {};
    cvec r(o.size() + h.size() - 1);
    for (size_t l = 0; l < h.size(); ++l) {
        if (h[l] == cd(0.0)) continue;
        for (size_t t = 0; t < o.size(); ++t) r[t + l] += h[l] * o[t];
    }
    return r;
}

cvec apply_channel(const cvec& o, const cvec& h, const cvec& prevTail) {
    cvec r(o.size());
    const size_t L = h.size();
    for (size_t l = 0; l < L; ++l)
        for (size_t t = l; t < o.size(); ++t) r[t] += h[l] * o[t - l];
    if (!prevTail.empty()) {
        const long T = static_cast<long>(prevTail.size());
        for (size_t t = 0; t + 1 < L && t < o.size(); ++t)
            for (size_t l = t + 1; l < L; ++l) {
                // Sample t-l of the previous block, counted back from its end.
                const long idx = T + static_cast<long>(t) - static_cast<long>(l);
                if (idx >= 0) r[t] += h[l] * prevTail[static_cast<size_t>(idx)];
            }
    }
    return r;
}

void add_noise(cvec& r, double sigma2, Rng& rng) {
    if (sigma2 <= 0.0) return;
    std::normal_distribution<double> nd(0.0, std::sqrt(sigma2 / 2.0));
    for (auto& x : r) {
        const double re = nd(rng);
        const double im = nd(rng);
        x += cd(re, im);
    }
}

}  // namespace fbmc
