#pragma once

#include <filesystem>
#include <vector>

namespace avact {

// Minimal 16-bit PCM mono WAV I/O (the synthetic corpus format).
void save_wav(const std::vector<float>& samples, int sample_rate, const std::filesystem::path& path);
// Returns samples in [-1,1]; sets sample_rate. Throws FormatError on
// anything but 16-bit mono PCM.
std::vector<float> load_wav(const std::filesystem::path& path, int& sample_rate);

}  // namespace avact
