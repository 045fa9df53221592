#include "sympdyn/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace sympdyn::kernels {

#ifndef SYMPDYN_HAVE_AVX2
const Ops* avx2_ops() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend resolve_backend() {
    const char* env = std::getenv("SYMPDYN_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_ops() != nullptr && cpu_has_avx2())
            return Backend::Avx2;
        if (std::strcmp(env, "avx2") == 0) return Backend::Scalar; // requested but unavailable
    }
    return (avx2_ops() != nullptr && cpu_has_avx2()) ? Backend::Avx2 : Backend::Scalar;
}

} // namespace

Backend active_backend() {
    static const Backend b = resolve_backend();
    return b;
}

const Ops& ops() {
    static const Ops* table =
        (active_backend() == Backend::Avx2) ? avx2_ops() : &scalar_ops();
    return *table;
}

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

} // namespace sympdyn::kernels
