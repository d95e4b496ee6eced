#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "avact/nets.hpp"
#include "avact/vocabulary.hpp"

namespace avact {

// Average motion a Conv1 filter of the action model responds to: the
// spatial mean over the receptive field of each (dx, dy) channel pair,
// giving five ordered segments that chain into a movement path.
struct FilterTrajectory {
    int filter_index = 0;
    std::array<std::array<double, 2>, 5> segments{};  // (dx, dy) per flow step
};

// conv1_w: [F, 10, k, k] (flow channels interleaved dx0,dy0,...,dx4,dy4).
// Throws ShapeMismatch unless the channel count is 10.
std::vector<FilterTrajectory> conv1_trajectories(const Tensor& conv1_w);

// One SVG figure with all filters' chained trajectories.
std::vector<FilterTrajectory> visualize_conv1(const Tensor& conv1_w,
                                              const std::filesystem::path& svg_path);

// Rectified Conv1 responses of one frame batch [N, C, H, W], reduced to
// the spatial max per filter: [N][F].
std::vector<std::vector<double>> filter_maxima(const VisualNet& model, const Tensor& frames);

struct CharacterizingFilters {
    std::vector<std::string> instruments;
    Tensor matrix;                       // [G, F], columns L1-normalized over instruments
    std::vector<std::vector<int>> top;   // per instrument, top filters (descending)
};

// per_instrument[g] holds the per-frame filter-max vectors of instrument
// g's positive frames. Throws NoPositiveFrames when an instrument has
// none.
CharacterizingFilters rank_characterizing(const InstrumentVocabulary& vocab,
                                          const std::vector<std::vector<std::vector<double>>>& per_instrument,
                                          std::size_t n_filters, int top_k = 5);

void write_ranking_csv(const CharacterizingFilters& cf, const std::filesystem::path& path);
void plot_characterizing(const CharacterizingFilters& cf, const std::filesystem::path& svg_path);

}  // namespace avact
