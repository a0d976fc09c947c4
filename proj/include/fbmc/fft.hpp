#pragma once

#include "fbmc/types.hpp"

namespace fbmc {

// Unitary transforms: dft(x)[k] = N^-1/2 sum_t x[t] e^{-j2pi kt/N}.
void dft_inplace(cd* x, int n);
void idft_inplace(cd* x, int n);

cvec dft_segment(const cvec& x);
cvec idft_segment(const cvec& x);

}  // namespace fbmc
