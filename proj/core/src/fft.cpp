#include "ddlink/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ddlink {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array
// interface is. Plans are created once per (n, sign) with FFTW_UNALIGNED
// so they can run on any std::vector buffer.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        cvec scratch(static_cast<size_t>(n));
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

} // namespace

void fft_inplace(cvec& x, int sign) {
    if (x.empty()) return;
    if (x.size() == 1) return;
    fftw_plan plan = PlanCache::instance().get(static_cast<int>(x.size()), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan, buf, buf);
}

cvec fft(const cvec& x) {
    cvec y = x;
    fft_inplace(y, FFTW_FORWARD);
    return y;
}

cvec ifft(const cvec& x) {
    cvec y = x;
    fft_inplace(y, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (cd& v : y) v *= scale;
    return y;
}

cvec upsample_fft(const cvec& x, int factor) {
    if (factor < 1) throw std::invalid_argument("upsample_fft: factor must be >= 1");
    if (factor == 1 || x.empty()) return x;
    const size_t n = x.size();
    const size_t m = n * static_cast<size_t>(factor);
    cvec spec = fft(x);
    cvec up(m, cd(0.0, 0.0));
    const size_t half = n / 2;
    // Positive frequencies [0, half), negative frequencies (half, n).
    for (size_t i = 0; i < half; ++i) up[i] = spec[i];
    for (size_t i = half + 1; i < n; ++i) up[m - n + i] = spec[i];
    if (n % 2 == 0) {
        // Split the Nyquist bin symmetrically to keep the kernel linear-phase.
        up[half] = 0.5 * spec[half];
        up[m - half] = 0.5 * spec[half];
    } else {
        up[half] = spec[half];
    }
    cvec y = ifft(up);
    const double scale = static_cast<double>(factor);
    for (cd& v : y) v *= scale;
    return y;
}

} // namespace ddlink
