#include "avact/mel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fftw3.h>

namespace avact {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filterbank, HTK scale, fmin 0 .. fmax sr/2.
// filters[m][k] over the n_fft/2+1 spectrum bins.
std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_fft, int sample_rate) {
    const int n_bins = n_fft / 2 + 1;
    const double fmax = sample_rate / 2.0;
    const double mel_max = hz_to_mel(fmax);
    std::vector<double> centers(n_mels + 2);
    for (int m = 0; m < n_mels + 2; ++m) centers[m] = mel_to_hz(mel_max * m / (n_mels + 1));
    std::vector<std::vector<double>> filters(n_mels, std::vector<double>(n_bins, 0.0));
    const double bin_hz = static_cast<double>(sample_rate) / n_fft;
    for (int m = 0; m < n_mels; ++m) {
        const double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            if (f <= lo || f >= hi) continue;
            filters[m][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return filters;
}

// Sample with reflection at the signal edges.
float reflect_sample(const std::vector<float>& x, long i) {
    const long n = static_cast<long>(x.size());
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    if (i < 0) i = 0;  // degenerate tiny signals
    return x[static_cast<std::size_t>(i)];
}

}  // namespace

MelStack extract_mel_3scale(const std::vector<float>& audio, const MelParams& params) {
    const int max_window = *std::max_element(params.window_sizes.begin(), params.window_sizes.end());
    if (static_cast<int>(audio.size()) < max_window)
        throw AudioTooShort("need at least " + std::to_string(max_window) + " samples, got " +
                            std::to_string(audio.size()));
    const std::size_t T = audio.size() / static_cast<std::size_t>(params.hop);

    MelStack stack;
    stack.window_sizes = params.window_sizes;
    stack.hop = params.hop;
    stack.sample_rate = params.sample_rate;

    for (int s = 0; s < 3; ++s) {
        const int W = params.window_sizes[s];
        const int n_bins = W / 2 + 1;
        auto filters = mel_filterbank(params.n_mels, W, params.sample_rate);

        std::vector<double> hann(W);
        for (int i = 0; i < W; ++i) hann[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / W);

        double* in = fftw_alloc_real(W);
        fftw_complex* out = fftw_alloc_complex(n_bins);
        fftw_plan plan = fftw_plan_dft_r2c_1d(W, in, out, FFTW_ESTIMATE);

        Tensor mel({static_cast<std::size_t>(params.n_mels), T});
        std::vector<double> power(n_bins);
        for (std::size_t t = 0; t < T; ++t) {
            const long center = static_cast<long>(t) * params.hop;
            for (int i = 0; i < W; ++i)
                in[i] = hann[i] * reflect_sample(audio, center + i - W / 2);
            fftw_execute(plan);
            for (int k = 0; k < n_bins; ++k)
                power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
            for (int m = 0; m < params.n_mels; ++m) {
                double acc = 0.0;
                for (int k = 0; k < n_bins; ++k) acc += filters[m][k] * power[k];
                mel.at(m, t) = std::log(std::max(acc, params.floor));
            }
        }
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
        stack.scales[s] = std::move(mel);
    }
    return stack;
}

}  // namespace avact
