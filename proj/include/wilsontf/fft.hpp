#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace wilsontf {

using cd = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe, execution with new arrays is. Plans are
// made once per (length, sign) and executed through fftw_execute_dft.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<cd> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                       reinterpret_cast<fftw_complex*>(b.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    ~PlanCache() {
        for (auto& kv : plans_) fftw_destroy_plan(kv.second);
    }

private:
    PlanCache() = default;
    std::mutex mu_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

// Unnormalized transform: out_k = sum_j in_j exp(sign * 2 pi i jk/n), sign = -1 or +1.
inline std::vector<cd> fft(const std::vector<cd>& in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<cd> out(in.size());
    if (n == 0) return out;
    fftw_plan p = detail::PlanCache::instance().get(n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace wilsontf
