#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops used by the conv layers, optimizers and
// stream fusion. Each kernel has a scalar reference implementation and
// an AVX2 variant; the dispatcher picks one at startup based on CPUID.
// The two variants must agree bit-for-bit for mul/axpy/scale and to
// within reassociation error for the reductions (tests pin the bound).

namespace avact::kern {

struct Ops {
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = a[i] * b[i]
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // x[i] *= alpha
    void (*scale)(double alpha, double* x, std::size_t n);
    // sum_i a[i]
    double (*sum)(const double* a, std::size_t n);
    const char* name;
};

const Ops& scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif

// Active implementation (selected once, thread-safe).
const Ops& active();

// Force a specific implementation by name ("scalar", "avx2", "auto").
// Used by tests and the CLI's --kernels flag.
void select(const std::string& name);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void mul(const double* a, const double* b, double* out, std::size_t n) { active().mul(a, b, out, n); }
inline void scale(double alpha, double* x, std::size_t n) { active().scale(alpha, x, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }

}  // namespace avact::kern
