#pragma once

#include <memory>

#include "wilsontf/wilsontf.hpp"

namespace wtest {

using namespace wilsontf;

inline const GridSpec& grid() {
    static const GridSpec g{16, 32};
    return g;
}

inline std::shared_ptr<const TightWindow> window() {
    static const auto w = std::make_shared<const TightWindow>(default_window(grid()));
    return w;
}

inline const WilsonSystem& system() {
    static const WilsonSystem s = make_system(window(), 15, 24);
    return s;
}

inline Signal sampled(const FunctionSpec& f, const GridSpec& g = grid()) { return sample(f, g); }

inline Signal normalized(const Signal& f) {
    Signal out = f;
    const double n = norm(f);
    for (auto& v : out.values) v /= n;
    return out;
}

}  // namespace wtest
