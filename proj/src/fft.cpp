#include "fbmc/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace fbmc {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
fftw_plan plan_for(int n, int sign) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

void run(cd* x, int n, int sign) {
    if (n <= 0) throw std::invalid_argument("transform length must be positive");
    auto* data = reinterpret_cast<fftw_complex*>(x);
    fftw_execute_dft(plan_for(n, sign), data, data);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) x[i] *= s;
}

}  // namespace

void dft_inplace(cd* x, int n) { run(x, n, FFTW_FORWARD); }
void idft_inplace(cd* x, int n) { run(x, n, FFTW_BACKWARD); }

cvec dft_segment(const cvec& x) {
    cvec y = x;
    dft_inplace(y.data(), static_cast<int>(y.size()));
    return y;
}

cvec idft_segment(const cvec& x) {
    cvec y = x;
    idft_inplace(y.data(), static_cast<int>(y.size()));
    return y;
}

}  // namespace fbmc
