#include "llmens/simd/kernels.hpp"

namespace llmens::simd {
namespace {

float squared_l2_scalar(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        const float d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

float dot_scalar(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void add_inplace_scalar(float* acc, const float* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += v[i];
}

void scale_inplace_scalar(float* v, float s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= s;
}

}  // namespace

const KernelTable& kernels_scalar() {
    static const KernelTable table{squared_l2_scalar, dot_scalar, add_inplace_scalar,
                                   scale_inplace_scalar};
    return table;
}

}  // namespace llmens::simd
