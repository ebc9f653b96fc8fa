#include <doctest.h>

#include <cmath>
#include <vector>

#include "llmens/rng.hpp"
#include "llmens/simd/kernels.hpp"

namespace simd = llmens::simd;

namespace {

// Restores the automatically-selected backend when a test is done.
struct BackendGuard {
    simd::Backend saved = simd::active_backend();
    ~BackendGuard() { simd::force_backend(saved); }
};

std::vector<float> random_vec(std::size_t n, llmens::SplitMix64& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = float(20.0 * rng.u01() - 10.0);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match direct arithmetic") {
    BackendGuard guard;
    simd::force_backend(simd::Backend::scalar);

    const std::vector<float> a{1, 2, 3};
    const std::vector<float> b{4, 6, 3};
    CHECK(simd::squared_l2(a, b) == doctest::Approx(9 + 16).epsilon(1e-7));
    CHECK(simd::dot(a, b) == doctest::Approx(4 + 12 + 9).epsilon(1e-7));

    std::vector<float> acc{1, 1, 1};
    simd::add_inplace(acc, a);
    CHECK(acc == std::vector<float>{2, 3, 4});
    simd::scale_inplace(acc, 0.5f);
    CHECK(acc == std::vector<float>{1, 1.5f, 2});
}

TEST_CASE("every available backend agrees with the scalar reference") {
    BackendGuard guard;
    llmens::SplitMix64 rng(2024);

    for (const std::size_t n : {0, 1, 2, 3, 7, 8, 9, 15, 16, 17, 100, 384, 1000}) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);

        simd::force_backend(simd::Backend::scalar);
        const float ref_l2 = simd::squared_l2(a, b);
        const float ref_dot = simd::dot(a, b);
        std::vector<float> ref_acc = a;
        simd::add_inplace(ref_acc, b);
        std::vector<float> ref_scaled = a;
        simd::scale_inplace(ref_scaled, 0.37f);

        for (const simd::Backend backend : simd::available_backends()) {
            simd::force_backend(backend);
            INFO("backend=", simd::backend_name(backend), " n=", n);
            // reductions may reassociate; element-wise ops are bit-identical
            CHECK(simd::squared_l2(a, b) ==
                  doctest::Approx(ref_l2).epsilon(1e-5).scale(std::max(1.0f, ref_l2)));
            CHECK(simd::dot(a, b) ==
                  doctest::Approx(ref_dot).epsilon(1e-5).scale(std::max(1.0f, std::abs(ref_dot))));
            std::vector<float> acc = a;
            simd::add_inplace(acc, b);
            CHECK(acc == ref_acc);
            std::vector<float> scaled = a;
            simd::scale_inplace(scaled, 0.37f);
            CHECK(scaled == ref_scaled);
        }
    }
}

TEST_CASE("dispatch state") {
    const auto backends = simd::available_backends();
    REQUIRE(!backends.empty());
    CHECK(backends.front() == simd::Backend::scalar);

    bool active_listed = false;
    for (const auto b : backends) {
        if (b == simd::active_backend()) active_listed = true;
    }
    CHECK(active_listed);

#if defined(__x86_64__)
    // forcing an unavailable backend must throw, never crash
    if (!simd::backend_available(simd::Backend::neon)) {
        CHECK_THROWS(simd::force_backend(simd::Backend::neon));
    }
#endif
}
