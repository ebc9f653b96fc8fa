#include <atomic>
#include <cstdlib>
#include <string>

#include "llmens/error.hpp"
#include "llmens/simd/kernels.hpp"

namespace llmens::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
#else
    return false;
#endif
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &kernels_scalar();
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return &kernels_avx2();
#else
            return nullptr;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return &kernels_neon();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend pick_default() {
    if (const char* env = std::getenv("LLMENS_SIMD")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
        if (want == "neon" && backend_available(Backend::neon)) return Backend::neon;
        // Unknown or unavailable override falls through to auto-detection.
    }
    if (backend_available(Backend::avx2)) return Backend::avx2;
    if (backend_available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

struct Active {
    std::atomic<const KernelTable*> table;
    std::atomic<Backend> backend;
    Active() {
        const Backend b = pick_default();
        backend.store(b);
        table.store(table_for(b));
    }
};

Active& active() {
    static Active a;
    return a;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
            return cpu_has_avx2() && table_for(Backend::avx2) != nullptr;
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
        if (backend_available(b)) out.push_back(b);
    }
    return out;
}

Backend active_backend() { return active().backend.load(); }

void force_backend(Backend b) {
    if (!backend_available(b)) {
        throw validation_error(std::string("SIMD backend unavailable on this CPU: ") +
                               backend_name(b));
    }
    active().backend.store(b);
    active().table.store(table_for(b));
}

float squared_l2(std::span<const float> a, std::span<const float> b) {
    return active().table.load()->squared_l2(a.data(), b.data(), a.size());
}

float dot(std::span<const float> a, std::span<const float> b) {
    return active().table.load()->dot(a.data(), b.data(), a.size());
}

void add_inplace(std::span<float> acc, std::span<const float> v) {
    active().table.load()->add_inplace(acc.data(), v.data(), acc.size());
}

void scale_inplace(std::span<float> v, float s) {
    active().table.load()->scale_inplace(v.data(), s, v.size());
}

}  // namespace llmens::simd
