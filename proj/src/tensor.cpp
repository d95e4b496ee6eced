#include "avact/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace avact {

Tensor::Tensor(std::vector<std::size_t> dims, double fill) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 4) throw ShapeMismatch("tensor rank must be 1..4");
    std::size_t total = 1;
    for (std::size_t d : dims_) {
        if (d == 0) throw ShapeMismatch("zero-sized dimension");
        total *= d;
    }
    // strides: st_[i] = product of dims after i
    if (dims_.size() >= 2) {
        std::size_t acc = 1;
        for (std::size_t i = dims_.size() - 1; i-- > 0;) {
            acc *= dims_[i + 1];
            st_[i] = acc;
        }
    }
    data_.assign(total, fill);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Tensor::min() const {
    return *std::min_element(data_.begin(), data_.end());
}

double Tensor::max() const {
    return *std::max_element(data_.begin(), data_.end());
}

std::size_t Tensor::argmax() const {
    return static_cast<std::size_t>(std::max_element(data_.begin(), data_.end()) - data_.begin());
}

void Tensor::quantize_to_f32() {
    for (double& v : data_) v = static_cast<double>(static_cast<float>(v));
}

namespace {
constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw FormatError("truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace

void save_tensor(const Tensor& t, const std::filesystem::path& path) {
    if (t.rank() == 0 || t.rank() > 4) throw FormatError("tensor rank must be 1..4");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.dims()) put_u32(os, static_cast<std::uint32_t>(d));
    std::vector<float> payload(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) payload[i] = static_cast<float>(t[i]);
    static_assert(std::endian::native == std::endian::little);
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!os) throw FormatError("write failed: " + path.string());
}

Tensor load_tensor(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic in " + path.string());
    std::uint32_t rank = get_u32(is);
    if (rank == 0 || rank > 4) throw FormatError("bad rank in " + path.string());
    std::vector<std::size_t> dims(rank);
    std::size_t total = 1;
    for (auto& d : dims) {
        d = get_u32(is);
        if (d == 0 || total > std::numeric_limits<std::uint32_t>::max() / d)
            throw FormatError("bad dims in " + path.string());
        total *= d;
    }
    std::vector<float> payload(total);
    is.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(total * sizeof(float)));
    if (static_cast<std::size_t>(is.gcount()) != total * sizeof(float))
        throw FormatError("truncated payload in " + path.string());
    Tensor t(dims);
    for (std::size_t i = 0; i < total; ++i) t[i] = static_cast<double>(payload[i]);
    return t;
}

}  // namespace avact
