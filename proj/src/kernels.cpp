// SPDX-License-Identifier: Apache-2.0

#include "cbg/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace cbg::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

#if !defined(__x86_64__) && !defined(__i386__)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& active_ops() {
    static const Ops& chosen = []() -> const Ops& {
        if (const char* env = std::getenv("CBG_KERNELS");
            env && std::string_view(env) == "scalar") {
            return scalar_ops();
        }
        if (avx2_supported()) {
            if (const Ops* ops = avx2_ops()) {
                return *ops;
            }
        }
        return scalar_ops();
    }();
    return chosen;
}

}  // namespace cbg::kernels
