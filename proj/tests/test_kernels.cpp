#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "avact/kernels.hpp"
#include "avact/tensor.hpp"

using namespace avact;

namespace {
std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}
}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
    const auto& sc = kern::scalar_ops();
#if defined(__x86_64__)
    if (!__builtin_cpu_supports("avx2")) return;
    const auto& vx = kern::avx2_ops();
    std::mt19937_64 rng(7);
    // odd sizes exercise the remainder loops
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 15u, 64u, 1001u}) {
        auto a = random_vec(rng, n), b = random_vec(rng, n);
        // FMA reassociation in the reductions; elementwise ops bit-exact
        CHECK(sc.dot(a.data(), b.data(), n) == doctest::Approx(vx.dot(a.data(), b.data(), n)).epsilon(1e-13));
        CHECK(sc.sum(a.data(), n) == doctest::Approx(vx.sum(a.data(), n)).epsilon(1e-13));

        auto out_s = a, out_v = a;
        sc.mul(a.data(), b.data(), out_s.data(), n);
        vx.mul(a.data(), b.data(), out_v.data(), n);
        CHECK(out_s == out_v);

        auto ys = b, yv = b;
        sc.axpy(0.37, a.data(), ys.data(), n);
        vx.axpy(0.37, a.data(), yv.data(), n);
        CHECK(ys == yv);

        auto xs = a, xv = a;
        sc.scale(-1.25, xs.data(), n);
        vx.scale(-1.25, xv.data(), n);
        CHECK(xs == xv);
    }
#endif
}

TEST_CASE("kernel selection") {
    kern::select("scalar");
    CHECK(std::string(kern::active().name) == "scalar");
    kern::select("auto");
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) CHECK(std::string(kern::active().name) == "avx2");
#endif
    CHECK_THROWS_AS(kern::select("sse9"), ConfigError);
}

TEST_CASE("tensor shape and access") {
    Tensor t({2, 3, 4});
    CHECK(t.size() == 24);
    t.at(1, 2, 3) = 5.0;
    CHECK(t[23] == 5.0);
    CHECK(t.max() == 5.0);
    CHECK(t.argmax() == 23);
    CHECK_THROWS_AS(Tensor({1, 2, 3, 4, 5}), ShapeMismatch);
    CHECK_THROWS_AS(Tensor(std::vector<std::size_t>{}), ShapeMismatch);
}

TEST_CASE("tensor container round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> d(-10.f, 10.f);
    Tensor t({9, 10, 8, 6});
    SUBCASE("zero tensor") {}
    SUBCASE("random float32 values") {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(d(rng));
    }
    auto path = std::filesystem::temp_directory_path() / "avact_test_tensor.tnsr";
    save_tensor(t, path);
    Tensor u = load_tensor(path);
    REQUIRE(u.dims() == t.dims());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(u[i] == t[i]);
    std::filesystem::remove(path);
}

TEST_CASE("tensor container corruption") {
    auto dir = std::filesystem::temp_directory_path();
    auto path = dir / "avact_test_trunc.tnsr";
    Tensor t({4, 4}, 1.0);
    save_tensor(t, path);
    // truncate mid-payload
    std::filesystem::resize_file(path, 20);
    CHECK_THROWS_AS(load_tensor(path), FormatError);
    // bad magic
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE****************";
    }
    CHECK_THROWS_AS(load_tensor(path), FormatError);
    std::filesystem::remove(path);
}
