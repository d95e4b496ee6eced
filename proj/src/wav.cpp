#include "avact/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "avact/errors.hpp"

namespace avact {

namespace {
void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u16(std::ostream& os, std::uint16_t v) { os.write(reinterpret_cast<const char*>(&v), 2); }
std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint16_t get_u16(std::istream& is) {
    std::uint16_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 2);
    return v;
}
}  // namespace

void save_wav(const std::vector<float>& samples, int sample_rate, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
    os.write("RIFF", 4);
    put_u32(os, 36 + data_bytes);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    put_u32(os, 16);
    put_u16(os, 1);  // PCM
    put_u16(os, 1);  // mono
    put_u32(os, static_cast<std::uint32_t>(sample_rate));
    put_u32(os, static_cast<std::uint32_t>(sample_rate * 2));
    put_u16(os, 2);
    put_u16(os, 16);
    os.write("data", 4);
    put_u32(os, data_bytes);
    for (float s : samples) {
        float c = std::clamp(s, -1.0f, 1.0f);
        auto v = static_cast<std::int16_t>(std::lround(c * 32767.0f));
        os.write(reinterpret_cast<const char*>(&v), 2);
    }
    if (!os) throw FormatError("write failed: " + path.string());
}

std::vector<float> load_wav(const std::filesystem::path& path, int& sample_rate) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    char tag[4];
    is.read(tag, 4);
    if (!is || std::memcmp(tag, "RIFF", 4) != 0) throw FormatError("not a RIFF file: " + path.string());
    get_u32(is);
    is.read(tag, 4);
    if (!is || std::memcmp(tag, "WAVE", 4) != 0) throw FormatError("not a WAVE file: " + path.string());
    std::vector<float> samples;
    bool got_fmt = false;
    while (is.read(tag, 4)) {
        std::uint32_t chunk = get_u32(is);
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            std::uint16_t fmt = get_u16(is), ch = get_u16(is);
            sample_rate = static_cast<int>(get_u32(is));
            get_u32(is);
            get_u16(is);
            std::uint16_t bits = get_u16(is);
            if (fmt != 1 || ch != 1 || bits != 16)
                throw FormatError(path.string() + ": only 16-bit mono PCM supported");
            if (chunk > 16) is.seekg(chunk - 16, std::ios::cur);
            got_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            if (!got_fmt) throw FormatError(path.string() + ": data before fmt chunk");
            std::size_t n = chunk / 2;
            samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                std::int16_t v = 0;
                is.read(reinterpret_cast<char*>(&v), 2);
                samples[i] = static_cast<float>(v) / 32767.0f;
            }
            if (!is) throw FormatError(path.string() + ": truncated data chunk");
            return samples;
        } else {
            is.seekg(chunk + (chunk & 1), std::ios::cur);
        }
    }
    throw FormatError(path.string() + ": no data chunk");
}

}  // namespace avact
