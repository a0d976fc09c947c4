#pragma once

#include <random>
#include <string>

#include "fbmc/types.hpp"

namespace fbmc {

using Rng = std::mt19937_64;

struct PowerDelayProfile {
    rvec rho2;

    int length() const { return static_cast<int>(rho2.size()); }
    std::vector<std::string> violations(int N = 0) const;
    void validate(int N = 0) const;
};

// Exponential profile, last tap lastTapDb below the first, unit total power.
PowerDelayProfile exponential_pdp(int L, double lastTapDb = -20.0);
PowerDelayProfile default_pdp();
// `l,rho2` rows; blank lines and '#' comments ignored.
PowerDelayProfile load_pdp(const std::string& path, bool autoNormalize);

struct ChannelRealization {
    cvec taps;
    cvec C;  // N-point frequency response
};

cvec freq_response(const cvec& h, int N);
ChannelRealization draw_channel(const PowerDelayProfile& pdp, int N, Rng& rng);
ChannelRealization fixed_channel(const cvec& h, int N);

// Linear convolution truncated to o.size(). prevTail holds the previous block's
// last samples (most recent last); its channel tail lands in the first L-1 outputs.
cvec apply_channel(const cvec& o, const cvec& h, const cvec& prevTail = {});

// Full convolution, length o.size() + L - 1.
cvec convolve_full(const cvec& o, const cvec& h);

cd complex_gaussian(Rng& rng, double variance);
void add_noise(cvec& r, double sigma2, Rng& rng);

}  // namespace fbmc
