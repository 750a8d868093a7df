#include <atomic>
#include <cstdlib>
#include <string>

#include "ymh/kernels.hpp"

namespace ymh::kernels {

namespace {

bool detect(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa initial_isa() {
    if (const char* env = std::getenv("YMH_SIMD")) {
        if (std::string(env) == "scalar") return Isa::scalar;
    }
    return detect(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

bool cpu_supports(Isa isa) { return detect(isa); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

const Table& active() {
    return active_isa() == Isa::avx2 ? *avx2_table() : scalar_table();
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

void select(Isa isa) {
    if (!detect(isa)) {
        throw InvalidArgument("SIMD variant '" + std::string(isa_name(isa)) +
                              "' is not available on this CPU");
    }
    current().store(isa, std::memory_order_relaxed);
}

}  // namespace ymh::kernels
