#include "avact/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "avact/errors.hpp"

namespace avact {

std::vector<FilterTrajectory> conv1_trajectories(const Tensor& conv1_w) {
    if (conv1_w.rank() != 4 || conv1_w.dims()[1] != 10)
        throw ShapeMismatch("trajectory analysis expects [F, 10, k, k] weights");
    const std::size_t F = conv1_w.dims()[0];
    const std::size_t k = conv1_w.dims()[2];
    const double field = static_cast<double>(k * conv1_w.dims()[3]);
    std::vector<FilterTrajectory> out(F);
    for (std::size_t f = 0; f < F; ++f) {
        out[f].filter_index = static_cast<int>(f);
        for (std::size_t s = 0; s < 5; ++s)
            for (std::size_t c = 0; c < 2; ++c) {
                double sum = 0.0;
                for (std::size_t y = 0; y < k; ++y)
                    for (std::size_t x = 0; x < conv1_w.dims()[3]; ++x)
                        sum += conv1_w.at(f, 2 * s + c, y, x);
                out[f].segments[s][c] = sum / field;
            }
    }
    return out;
}

namespace {

void svg_header(std::ofstream& os, int w, int h) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::vector<FilterTrajectory> visualize_conv1(const Tensor& conv1_w,
                                              const std::filesystem::path& svg_path) {
    auto trajectories = conv1_trajectories(conv1_w);
    const int cols = 12;
    const int rows = static_cast<int>((trajectories.size() + cols - 1) / cols);
    const int cell = 64;
    std::ofstream os(svg_path);
    if (!os) throw FormatError("cannot write " + svg_path.string());
    svg_header(os, cols * cell, std::max(1, rows) * cell);

    // common scale so segment lengths are comparable across filters
    double max_mag = 1e-12;
    for (const auto& t : trajectories) {
        double x = 0, y = 0;
        for (const auto& s : t.segments) {
            x += s[0];
            y += s[1];
            max_mag = std::max({max_mag, std::abs(x), std::abs(y)});
        }
    }
    const double scale = 0.42 * cell / max_mag;

    for (std::size_t f = 0; f < trajectories.size(); ++f) {
        const double cx = (static_cast<double>(f % cols) + 0.5) * cell;
        const double cy = (static_cast<double>(f / cols) + 0.5) * cell;
        os << "<polyline fill=\"none\" stroke=\"#1a6faf\" stroke-width=\"1.5\" points=\"" << cx
           << ',' << cy;
        double x = cx, y = cy;
        for (const auto& s : trajectories[f].segments) {
            x += s[0] * scale;
            y += s[1] * scale;
            os << ' ' << x << ',' << y;
        }
        os << "\"/>\n<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"1.5\" fill=\"#c33\"/>\n";
    }
    os << "</svg>\n";
    return trajectories;
}

std::vector<std::vector<double>> filter_maxima(const VisualNet& model, const Tensor& frames) {
    Tensor resp = model.conv1_response(frames);  // [N, F, H', W']
    const std::size_t N = resp.dims()[0], F = resp.dims()[1];
    const std::size_t spatial = resp.dims()[2] * resp.dims()[3];
    std::vector<std::vector<double>> out(N, std::vector<double>(F, 0.0));
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t f = 0; f < F; ++f) {
            const double* p = resp.data() + (n * F + f) * spatial;
            double m = 0.0;  // rectified: max(0, response)
            for (std::size_t i = 0; i < spatial; ++i) m = std::max(m, p[i]);
            out[n][f] = m;
        }
    return out;
}

CharacterizingFilters rank_characterizing(const InstrumentVocabulary& vocab,
                                          const std::vector<std::vector<std::vector<double>>>& per_instrument,
                                          std::size_t n_filters, int top_k) {
    if (per_instrument.size() != vocab.size())
        throw ShapeMismatch("per-instrument frame lists vs vocabulary");
    CharacterizingFilters cf;
    cf.matrix = Tensor({vocab.size(), n_filters});
    for (std::size_t g = 0; g < vocab.size(); ++g) {
        cf.instruments.push_back(vocab.name(g));
        const auto& frames = per_instrument[g];
        if (frames.empty()) throw NoPositiveFrames("no positive frames for " + vocab.name(g));
        for (const auto& v : frames) {
            if (v.size() != n_filters) throw ShapeMismatch("frame response vector length");
            for (std::size_t f = 0; f < n_filters; ++f) cf.matrix.at(g, f) += v[f];
        }
        for (std::size_t f = 0; f < n_filters; ++f)
            cf.matrix.at(g, f) /= static_cast<double>(frames.size());
    }
    for (std::size_t f = 0; f < n_filters; ++f) {
        double col = 0.0;
        for (std::size_t g = 0; g < vocab.size(); ++g) col += cf.matrix.at(g, f);
        if (col > 0.0)
            for (std::size_t g = 0; g < vocab.size(); ++g) cf.matrix.at(g, f) /= col;
    }
    for (std::size_t g = 0; g < vocab.size(); ++g) {
        std::vector<int> order(n_filters);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return cf.matrix.at(g, static_cast<std::size_t>(a)) >
                   cf.matrix.at(g, static_cast<std::size_t>(b));
        });
        order.resize(std::min<std::size_t>(static_cast<std::size_t>(top_k), n_filters));
        cf.top.push_back(std::move(order));
    }
    return cf;
}

void write_ranking_csv(const CharacterizingFilters& cf, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "instrument,rank,filter_index,normalized_score\n";
    for (std::size_t g = 0; g < cf.instruments.size(); ++g)
        for (std::size_t r = 0; r < cf.top[g].size(); ++r)
            os << cf.instruments[g] << ',' << (r + 1) << ',' << cf.top[g][r] << ','
               << cf.matrix.at(g, static_cast<std::size_t>(cf.top[g][r])) << '\n';
}

void plot_characterizing(const CharacterizingFilters& cf, const std::filesystem::path& svg_path) {
    const std::size_t G = cf.matrix.dims()[0], F = cf.matrix.dims()[1];
    const int cell_w = std::max(4, static_cast<int>(960 / F));
    const int cell_h = 28;
    const int left = 120, top = 24;
    std::ofstream os(svg_path);
    if (!os) throw FormatError("cannot write " + svg_path.string());
    svg_header(os, left + static_cast<int>(F) * cell_w + 8, top + static_cast<int>(G) * cell_h + 8);
    for (std::size_t g = 0; g < G; ++g) {
        os << "<text x=\"4\" y=\"" << top + (static_cast<int>(g) + 1) * cell_h - 10
           << "\" font-size=\"11\" font-family=\"sans-serif\">" << cf.instruments[g] << "</text>\n";
        for (std::size_t f = 0; f < F; ++f) {
            const int shade = 255 - static_cast<int>(std::lround(std::clamp(cf.matrix.at(g, f), 0.0, 1.0) * 255));
            os << "<rect x=\"" << left + static_cast<int>(f) * cell_w << "\" y=\""
               << top + static_cast<int>(g) * cell_h << "\" width=\"" << cell_w << "\" height=\""
               << cell_h << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
        }
    }
    os << "</svg>\n";
}

}  // namespace avact
