#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <vector>

#include "avact/errors.hpp"

namespace avact {

// Dense row-major tensor of doubles, rank 1..4. Arithmetic runs in
// double; the on-disk container stores float32 (see save_tensor).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);
    Tensor(std::initializer_list<std::size_t> dims, double fill = 0.0)
        : Tensor(std::vector<std::size_t>(dims), fill) {}

    std::size_t rank() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t i) const { return dims_.at(i); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::size_t i) { return data_[i]; }
    const double& operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i) { return data_[i]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * st_[0] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) { return data_[i * st_[0] + j * st_[1] + k]; }
    double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[i * st_[0] + j * st_[1] + k * st_[2] + l];
    }
    const double& at(std::size_t i) const { return data_[i]; }
    const double& at(std::size_t i, std::size_t j) const { return data_[i * st_[0] + j]; }
    const double& at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[i * st_[0] + j * st_[1] + k];
    }
    const double& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[i * st_[0] + j * st_[1] + k * st_[2] + l];
    }

    void fill(double v);
    bool same_shape(const Tensor& o) const { return dims_ == o.dims_; }
    double min() const;
    double max() const;
    // Index of the first maximum in row-major order.
    std::size_t argmax() const;

    // Rounds every entry to the nearest float32; save/load round-trips
    // are then exact.
    void quantize_to_f32();

private:
    std::vector<std::size_t> dims_;
    std::array<std::size_t, 3> st_{0, 0, 0};  // strides for dims 0..rank-2
    std::vector<double> data_;
};

// Binary container: magic "TNSR", u32 rank, rank x u32 dims (all
// little-endian), float32 payload in row-major order.
void save_tensor(const Tensor& t, const std::filesystem::path& path);
Tensor load_tensor(const std::filesystem::path& path);

}  // namespace avact
