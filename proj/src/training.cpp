#include "avact/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "avact/errors.hpp"
#include "avact/kernels.hpp"
#include "avact/metrics.hpp"
#include "avact/sampler.hpp"

namespace avact {

void TrainSchedule::validate() const {
    if (lr <= 0) throw ConfigError("learning rate must be positive");
    if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0,1)");
    if (epochs <= 0) throw ConfigError("epoch count must be positive");
    if (freeze_epochs < 0 || freeze_epochs > epochs)
        throw ConfigError("freeze epochs must be in [0, epochs]");
}

TrainSchedule TrainSchedule::sound_default() {
    TrainSchedule s;
    s.optimizer = Opt::adagrad;
    s.lr = 0.01;
    s.epochs = 100;
    return s;
}

TrainSchedule TrainSchedule::object_default() {
    TrainSchedule s;
    s.optimizer = Opt::sgd_momentum;
    s.lr = 0.001;
    s.momentum = 0.9;
    s.epochs = 50;
    s.freeze_epochs = 20;
    return s;
}

TrainSchedule TrainSchedule::action_default() {
    TrainSchedule s;
    s.optimizer = Opt::sgd_momentum;
    s.lr = 0.001;
    s.momentum = 0.9;
    s.epochs = 100;
    return s;
}

namespace {

class SgdMomentum final : public Optimizer {
public:
    SgdMomentum(double lr, double momentum) : lr_(lr), momentum_(momentum) {}

    void step(const std::vector<ParamRef>& params) override {
        for (const auto& p : params) {
            if (p.frozen && *p.frozen) continue;
            auto [it, inserted] = velocity_.try_emplace(p.name, Tensor(p.value->dims()));
            Tensor& v = it->second;
            if (!v.same_shape(*p.value)) throw ShapeMismatch("optimizer state for " + p.name);
            kern::scale(momentum_, v.data(), v.size());
            kern::axpy(-lr_, p.grad->data(), v.data(), v.size());
            kern::axpy(1.0, v.data(), p.value->data(), v.size());
        }
    }

private:
    double lr_, momentum_;
    std::map<std::string, Tensor> velocity_;
};

class Adagrad final : public Optimizer {
public:
    explicit Adagrad(double lr) : lr_(lr) {}

    void step(const std::vector<ParamRef>& params) override {
        for (const auto& p : params) {
            if (p.frozen && *p.frozen) continue;
            auto [it, inserted] = accum_.try_emplace(p.name, Tensor(p.value->dims()));
            Tensor& h = it->second;
            if (!h.same_shape(*p.value)) throw ShapeMismatch("optimizer state for " + p.name);
            const double* g = p.grad->data();
            double* hv = h.data();
            double* w = p.value->data();
            for (std::size_t i = 0; i < h.size(); ++i) {
                hv[i] += g[i] * g[i];
                w[i] -= lr_ * g[i] / (std::sqrt(hv[i]) + 1e-10);
            }
        }
    }

private:
    double lr_;
    std::map<std::string, Tensor> accum_;
};

std::filesystem::path epoch_dir(const std::filesystem::path& out_dir, int epoch) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "epoch_%03d", epoch);
    return out_dir / buf;
}

void append_metrics(const std::filesystem::path& out_dir, const EpochRecord& rec, bool first) {
    const auto path = out_dir / "metrics.csv";
    std::ofstream os(path, first ? std::ios::trunc : std::ios::app);
    if (!os) throw FormatError("cannot write " + path.string());
    if (first) os << "epoch,train_loss,val_clip_auc\n";
    os << rec.epoch << ',' << rec.train_loss << ',' << rec.val_clip_auc << '\n';
}

std::string rng_state_string(const std::mt19937_64& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

}  // namespace

std::unique_ptr<Optimizer> Optimizer::make(const TrainSchedule& schedule) {
    if (schedule.optimizer == TrainSchedule::Opt::adagrad)
        return std::make_unique<Adagrad>(schedule.lr);
    return std::make_unique<SgdMomentum>(schedule.lr, schedule.momentum);
}

const EpochRecord& TrainResult::best() const {
    if (epochs.empty()) throw NoCheckpoints("training produced no checkpoints");
    const EpochRecord* best = &epochs.front();
    for (const auto& e : epochs)
        if (e.val_clip_auc > best->val_clip_auc) best = &e;
    return *best;
}

double clip_level_auc(const std::vector<std::vector<double>>& scores, const std::vector<ClipTags>& tags) {
    if (scores.size() != tags.size()) throw ShapeMismatch("clip scores vs tags");
    if (scores.empty()) return 0.5;
    const std::size_t G = scores.front().size();
    double sum = 0.0;
    int classes = 0;
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> s(scores.size());
        std::vector<std::uint8_t> y(scores.size());
        for (std::size_t c = 0; c < scores.size(); ++c) {
            s[c] = scores[c][g];
            y[c] = tags[c].positive(g) ? 1 : 0;
        }
        if (const auto auc = frame_auc(s, y)) {
            sum += *auc;
            ++classes;
        }
    }
    return classes ? sum / classes : 0.5;
}

// ------------------------------------------------------------- sound run

TrainResult train_sound(SoundNet& net, const std::vector<SoundTrainItem>& train,
                        const std::vector<SoundTrainItem>& val, const TrainSchedule& schedule,
                        std::uint64_t seed, const std::filesystem::path& out_dir, int batch_size) {
    schedule.validate();
    if (train.empty()) throw NoValidClips("empty sound training set");
    if (batch_size <= 0) throw ConfigError("batch size must be positive");
    std::filesystem::create_directories(out_dir);

    const std::size_t G = train.front().tags.size();
    auto opt = Optimizer::make(schedule);
    std::mt19937_64 rng(seed);
    TrainResult result;

    auto stack_scales = [&](const std::vector<std::size_t>& idx, const std::vector<SoundTrainItem>& set) {
        const std::size_t B = idx.size();
        const std::size_t T = set[idx[0]].mel[0].dims()[1];
        std::array<Tensor, 3> scales;
        for (int s = 0; s < 3; ++s) {
            const std::size_t bands = set[idx[0]].mel[static_cast<std::size_t>(s)].dims()[0];
            scales[static_cast<std::size_t>(s)] = Tensor({B, bands, T});
            for (std::size_t b = 0; b < B; ++b) {
                const Tensor& m = set[idx[b]].mel[static_cast<std::size_t>(s)];
                std::copy(m.data(), m.data() + m.size(),
                          scales[static_cast<std::size_t>(s)].data() + b * bands * T);
            }
        }
        return scales;
    };

    for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
        std::vector<std::size_t> order(train.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t loss_items = 0;
        bool finite = true;
        for (std::size_t start = 0; start < order.size() && finite;) {
            // group clips of equal mel length into one batch
            std::vector<std::size_t> idx{order[start]};
            const std::size_t T = train[order[start]].mel[0].dims()[1];
            std::size_t next = start + 1;
            while (next < order.size() && idx.size() < static_cast<std::size_t>(batch_size) &&
                   train[order[next]].mel[0].dims()[1] == T)
                idx.push_back(order[next++]);
            start = next;

            const auto scales = stack_scales(idx, train);
            const Tensor frame_out = net.forward(scales, true);
            const Tensor clip_scores = temporal_average(frame_out);
            Tensor q({idx.size(), G});
            for (std::size_t b = 0; b < idx.size(); ++b)
                for (std::size_t g = 0; g < G; ++g)
                    q.at(b, g) = train[idx[b]].tags.positive(g) ? 1.0 : 0.0;
            const double loss = bce_loss(clip_scores, q);
            if (!std::isfinite(loss)) {
                finite = false;
                break;
            }
            loss_sum += loss * static_cast<double>(idx.size());
            loss_items += idx.size();
            net.zero_grad();
            net.backward(temporal_average_backward(bce_grad(clip_scores, q), frame_out.dims()[2]));
            opt->step(net.params());
        }
        if (!finite) {
            if (result.epochs.empty()) throw DivergenceDetected("non-finite loss in epoch 1");
            result.diverged = true;
            return result;
        }

        std::vector<std::vector<double>> val_scores;
        std::vector<ClipTags> val_tags;
        for (const auto& item : val) {
            const auto scales = stack_scales({0}, {item});
            const Tensor clip_scores = temporal_average(net.forward(scales, false));
            std::vector<double> s(G);
            for (std::size_t g = 0; g < G; ++g) s[g] = clip_scores.at(std::size_t{0}, g);
            val_scores.push_back(std::move(s));
            val_tags.push_back(item.tags);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_items ? loss_sum / static_cast<double>(loss_items) : 0.0;
        rec.val_clip_auc = clip_level_auc(val_scores, val_tags);
        rec.checkpoint_dir = epoch_dir(out_dir, epoch);
        CheckpointMeta meta{epoch, rec.val_clip_auc, net.config().hash(), rng_state_string(rng)};
        save_checkpoint(net.state(), meta, rec.checkpoint_dir);
        append_metrics(out_dir, rec, epoch == 1);
        result.epochs.push_back(std::move(rec));
    }
    return result;
}

// ------------------------------------------------------------ visual runs

namespace {

// Supervision slice for frame k of sub-clip `sub`: anchor index on the
// target's time axis, clamped to its extent.
std::size_t target_time(int sub, std::size_t k, std::size_t T) {
    const std::size_t t = static_cast<std::size_t>(sub) * kSubClipFrames + k;
    return std::min(t, T - 1);
}

}  // namespace

TrainResult train_visual(VisualNet& net, const VisualDataset& train, const VisualDataset& val,
                         const TrainSchedule& schedule, std::uint64_t seed,
                         const std::filesystem::path& out_dir) {
    schedule.validate();
    if (train.n_clips == 0) throw NoValidClips("empty visual training set");
    if (train.tags.size() != train.n_clips) throw ShapeMismatch("training tags vs clip count");
    std::filesystem::create_directories(out_dir);

    const std::size_t G = train.tags.front().size();
    auto opt = Optimizer::make(schedule);
    MinibatchSampler sampler(train.n_clips, seed);
    TrainResult result;

    for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
        net.set_early_frozen(epoch <= schedule.freeze_epochs);
        sampler.start_epoch();
        double loss_sum = 0.0;
        std::size_t draws = 0;
        bool finite = true;
        while (true) {
            MinibatchSampler::Draw draw{};
            try {
                draw = sampler.next();
            } catch (const EpochExhausted&) {
                break;
            }
            const Tensor x = train.batch(draw.clip, draw.subclip);
            const Tensor maps = net.forward(x, true);  // [N, G, I, J]
            const std::size_t N = maps.dims()[0];
            const Target* tgt = train.target ? train.target(draw.clip) : nullptr;

            double loss = 0.0;
            net.zero_grad();
            if (!tgt || tgt->comparison == ComparisonMode::spatial_max) {
                Tensor q({N, G});
                for (std::size_t k = 0; k < N; ++k)
                    for (std::size_t g = 0; g < G; ++g) {
                        if (tgt) {
                            const auto t = target_time(draw.subclip, k, tgt->data.dims()[1]);
                            q.at(k, g) = tgt->data.at(g, t);
                        } else {
                            q.at(k, g) = train.tags[draw.clip].positive(g) ? 1.0 : 0.0;
                        }
                    }
                SpatialMaxPool pool;
                const Tensor p = pool.forward(maps);
                loss = bce_loss(p, q);
                if (std::isfinite(loss)) net.backward(pool.backward(bce_grad(p, q)));
            } else {
                const std::size_t I = maps.dims()[2], J = maps.dims()[3];
                if (tgt->data.dims()[2] != I || tgt->data.dims()[3] != J)
                    throw ShapeMismatch("target map grid vs model output grid");
                Tensor q({N, G, I, J});
                for (std::size_t k = 0; k < N; ++k) {
                    const auto t = target_time(draw.subclip, k, tgt->data.dims()[1]);
                    for (std::size_t g = 0; g < G; ++g)
                        for (std::size_t i = 0; i < I; ++i)
                            for (std::size_t j = 0; j < J; ++j)
                                q.at(k, g, i, j) = tgt->data.at(g, t, i, j);
                }
                loss = bce_loss(maps, q);
                if (std::isfinite(loss)) net.backward(bce_grad(maps, q));
            }
            if (!std::isfinite(loss)) {
                finite = false;
                break;
            }
            loss_sum += loss;
            ++draws;
            opt->step(net.params());
        }
        if (!finite) {
            if (result.epochs.empty()) throw DivergenceDetected("non-finite loss in epoch 1");
            result.diverged = true;
            return result;
        }

        std::vector<std::vector<double>> val_scores;
        for (std::size_t c = 0; c < val.n_clips; ++c) {
            const Tensor frames = val.val_frames(c);
            const Tensor maps = net.forward(frames, false);
            SpatialMaxPool pool;
            const Tensor p = pool.forward(maps);  // [K, G]
            std::vector<double> s(G, 0.0);
            for (std::size_t g = 0; g < G; ++g) {
                double m = p.at(std::size_t{0}, g);
                for (std::size_t k = 1; k < maps.dims()[0]; ++k) m = std::max(m, p.at(k, g));
                s[g] = m;
            }
            val_scores.push_back(std::move(s));
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = draws ? loss_sum / static_cast<double>(draws) : 0.0;
        rec.val_clip_auc = clip_level_auc(val_scores, val.tags);
        rec.checkpoint_dir = epoch_dir(out_dir, epoch);
        CheckpointMeta meta{epoch, rec.val_clip_auc, net.config().hash(),
                           "sampler_epoch=" + std::to_string(sampler.epoch())};
        save_checkpoint(net.state(), meta, rec.checkpoint_dir);
        append_metrics(out_dir, rec, epoch == 1);
        result.epochs.push_back(std::move(rec));
    }
    return result;
}

}  // namespace avact
