#include <atomic>

#include "avact/errors.hpp"
#include "avact/kernels.hpp"

namespace avact::kern {
namespace {

const Ops* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return &avx2_ops();
#endif
    return &scalar_ops();
}

std::atomic<const Ops*> g_active{nullptr};

}  // namespace

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = pick_auto();
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

void select(const std::string& name) {
    if (name == "auto") {
        g_active.store(pick_auto(), std::memory_order_release);
    } else if (name == "scalar") {
        g_active.store(&scalar_ops(), std::memory_order_release);
    } else if (name == "avx2") {
#if defined(__x86_64__) || defined(_M_X64)
        if (!__builtin_cpu_supports("avx2")) throw ConfigError("avx2 not supported on this CPU");
        g_active.store(&avx2_ops(), std::memory_order_release);
#else
        throw ConfigError("avx2 kernels unavailable on this architecture");
#endif
    } else {
        throw ConfigError("unknown kernel set '" + name + "'");
    }
}

}  // namespace avact::kern
