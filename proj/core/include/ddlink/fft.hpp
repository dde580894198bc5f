#pragma once

#include "ddlink/common.hpp"

namespace ddlink {

/// In-place complex DFT, unnormalized (like FFTW). sign = -1 forward,
/// sign = +1 inverse. Thread-safe; plans are cached per (size, sign).
void fft_inplace(cvec& x, int sign);

/// Out-of-place convenience wrappers. `ifft` applies the 1/n factor so
/// that ifft(fft(x)) == x.
cvec fft(const cvec& x);
cvec ifft(const cvec& x);

/// Band-limited (linear-phase, FFT zero-padding) upsampling by an integer
/// factor. Output has x.size()*factor samples; the values at the original
/// sample positions are preserved exactly.
cvec upsample_fft(const cvec& x, int factor);

} // namespace ddlink
