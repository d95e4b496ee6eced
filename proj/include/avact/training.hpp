#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avact/checkpoint.hpp"
#include "avact/nets.hpp"
#include "avact/supervision.hpp"

namespace avact {

struct TrainSchedule {
    enum class Opt { sgd_momentum, adagrad };
    Opt optimizer = Opt::sgd_momentum;
    double lr = 0.001;
    double momentum = 0.9;
    int epochs = 100;
    int freeze_epochs = 0;  // freeze early convs for the first K epochs

    void validate() const;
    // AdaGrad, lr 0.01, 100 epochs.
    static TrainSchedule sound_default();
    // SGD momentum 0.9, lr 0.001; early convs frozen 20 epochs, then 30 more.
    static TrainSchedule object_default();
    // SGD momentum 0.9, lr 0.001, 100 epochs (plus a separate 30-epoch fine-tune run).
    static TrainSchedule action_default();
};

class Optimizer {
public:
    virtual ~Optimizer() = default;
    virtual void step(const std::vector<ParamRef>& params) = 0;
    static std::unique_ptr<Optimizer> make(const TrainSchedule& schedule);
};

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_clip_auc = 0.0;
    std::filesystem::path checkpoint_dir;
};

struct TrainResult {
    std::vector<EpochRecord> epochs;
    bool diverged = false;
    // Highest validation AUC, earliest epoch on ties. Throws NoCheckpoints.
    const EpochRecord& best() const;
};

// Clip-level AUC: per class over clips (labels from tags), classes with
// one label skipped, mean over the rest. scores: [n_clips][G].
double clip_level_auc(const std::vector<std::vector<double>>& scores, const std::vector<ClipTags>& tags);

// ------------------------------------------------------------- sound run

struct SoundTrainItem {
    std::string clip_id;
    std::array<Tensor, 3> mel;  // [mel_bands, T] per scale
    ClipTags tags;
};

// BCE on clip scores (temporal average of the frame output) vs tags;
// per-epoch checkpoints with validation clip-level AUC.
TrainResult train_sound(SoundNet& net, const std::vector<SoundTrainItem>& train,
                        const std::vector<SoundTrainItem>& val, const TrainSchedule& schedule,
                        std::uint64_t seed, const std::filesystem::path& out_dir, int batch_size = 4);

// ------------------------------------------------------------ visual runs

// Mini-batch access for one corpus: inputs for a sub-clip draw are the
// 10 anchor frames (RGB for the object model, flow stacks for the
// action model), stacked [10, C, H, W].
struct VisualDataset {
    std::size_t n_clips = 0;
    std::vector<ClipTags> tags;  // per clip
    std::function<Tensor(std::size_t clip, int subclip)> batch;
    // Per-clip precomputed supervision target; when absent the trainer
    // builds the VT target from the tags.
    std::function<const Target*(std::size_t clip)> target;
    // Frames used for validation clip scoring, [K, C, H, W].
    std::function<Tensor(std::size_t clip)> val_frames;
};

// Object or action training: VT/OT/ST/SOT per the dataset's targets.
// Clip validation score per class is the max over the validation frames
// of the spatial max.
TrainResult train_visual(VisualNet& net, const VisualDataset& train, const VisualDataset& val,
                         const TrainSchedule& schedule, std::uint64_t seed,
                         const std::filesystem::path& out_dir);

}  // namespace avact
