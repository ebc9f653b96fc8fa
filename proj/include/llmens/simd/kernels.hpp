#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

// Vector arithmetic kernels for embedding-space math (k-means assignment,
// nearest-to-centroid search, mean pooling, normalization).
//
// A scalar reference implementation always exists; AVX2 (x86-64) and NEON
// (aarch64) variants are selected at runtime when the CPU supports them.
// The env var LLMENS_SIMD=scalar|avx2|neon overrides the automatic choice.
// SIMD variants reduce in a different association order than the scalar
// reference, so dot/squared_l2 results may differ in low-order bits; the
// element-wise kernels (add_inplace, scale_inplace) are bit-identical.
namespace llmens::simd {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
    float (*squared_l2)(const float*, const float*, std::size_t);
    float (*dot)(const float*, const float*, std::size_t);
    void (*add_inplace)(float*, const float*, std::size_t);
    void (*scale_inplace)(float*, float, std::size_t);
};

const KernelTable& kernels_scalar();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& kernels_avx2();
#endif
#if defined(__aarch64__)
const KernelTable& kernels_neon();
#endif

const char* backend_name(Backend b);
bool backend_available(Backend b);
std::vector<Backend> available_backends();

// Active backend: resolved once (env override, else best available).
Backend active_backend();
// Force a specific backend (tests, benchmarking). Throws if unavailable.
void force_backend(Backend b);

// Dispatched entry points. Spans must have equal length.
float squared_l2(std::span<const float> a, std::span<const float> b);
float dot(std::span<const float> a, std::span<const float> b);
void add_inplace(std::span<float> acc, std::span<const float> v);
void scale_inplace(std::span<float> v, float s);

}  // namespace llmens::simd
