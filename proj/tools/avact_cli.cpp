// avact: weakly-supervised audio-visual action localization workflow.
//
// Subcommands: synth, features, train, predict, targets, fuse, evaluate,
// viz. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "avact/analysis.hpp"
#include "avact/annotations.hpp"
#include "avact/checkpoint.hpp"
#include "avact/kernels.hpp"
#include "avact/pipeline.hpp"

namespace fs = std::filesystem;
using namespace avact;

namespace {

struct Common {
    std::string kernels = "auto";
    int jobs = 1;
};

void write_manifest(const fs::path& out_dir, const std::string& command, std::uint64_t seed,
                    const nlohmann::ordered_json& config) {
    fs::create_directories(out_dir);
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    std::ofstream os(out_dir / "run_manifest.json");
    os << j.dump(2) << '\n';
}

// A run directory (containing epoch_*/ checkpoints) resolves to its best
// epoch; a checkpoint directory (containing manifest.json) resolves to
// itself.
fs::path resolve_checkpoint(const fs::path& dir) {
    if (fs::exists(dir / "manifest.json")) return dir;
    fs::path best;
    double best_auc = -1.0;
    int best_epoch = 0;
    std::vector<fs::path> epochs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && e.path().filename().string().rfind("epoch_", 0) == 0)
            epochs.push_back(e.path());
    std::sort(epochs.begin(), epochs.end());
    for (const auto& p : epochs) {
        const auto meta = read_checkpoint_meta(p);
        if (meta.val_clip_auc > best_auc || best.empty()) {
            best_auc = meta.val_clip_auc;
            best_epoch = meta.epoch;
            best = p;
        }
    }
    (void)best_epoch;
    if (best.empty()) throw NoCheckpoints("no checkpoints under " + dir.string());
    return best;
}

VisualNet load_visual(const fs::path& dir, const std::string& preset, int in_ch, int classes) {
    VisualNet net(preset == "paper" ? VisualNetConfig::paper(in_ch, classes)
                                    : VisualNetConfig::mini(in_ch, classes),
                  0);
    load_checkpoint(net.state(), resolve_checkpoint(dir));
    return net;
}

SoundNet load_sound(const fs::path& dir, const std::string& preset, int classes) {
    SoundNet net(preset == "paper" ? SoundNetConfig::paper(classes) : SoundNetConfig::mini(classes), 0);
    load_checkpoint(net.state(), resolve_checkpoint(dir));
    return net;
}

void save_map(const ActivationMap& map, const fs::path& dir, const std::string& id) {
    save_tensor(map.data, dir / (id + ".map.tnsr"));
    nlohmann::ordered_json j;
    j["fps"] = map.fps;
    j["stride"] = map.stride;
    j["modality"] = modality_name(map.modality);
    std::ofstream os(dir / (id + ".map.json"));
    os << j.dump(2) << '\n';
}

ActivationMap read_map(const fs::path& dir, const std::string& id) {
    ActivationMap map;
    map.data = load_tensor(dir / (id + ".map.tnsr"));
    std::ifstream is(dir / (id + ".map.json"));
    if (is) {
        const auto j = nlohmann::json::parse(is);
        map.fps = j.value("fps", 1.953125);
        map.stride = j.value("stride", 1);
        const std::string m = j.value("modality", "action");
        map.modality = m == "object"   ? Modality::object
                       : m == "sound"  ? Modality::sound
                       : m == "fused"  ? Modality::fused
                                       : Modality::action;
    }
    return map;
}

std::vector<std::string> map_ids(const fs::path& dir) {
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string n = e.path().filename().string();
        const std::string suffix = ".map.tnsr";
        if (n.size() > suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0)
            ids.push_back(n.substr(0, n.size() - suffix.size()));
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

struct Split {
    std::vector<std::string> ids;
    std::vector<ClipTags> tags;
};

Split load_split(const fs::path& corpus, const std::string& prefix, const InstrumentVocabulary& vocab) {
    Split s;
    s.ids = pipeline::clips_with_prefix(corpus, prefix);
    if (s.ids.empty()) throw NoValidClips("no clips matching prefix '" + prefix + "'");
    for (const auto& id : s.ids) s.tags.push_back(pipeline::read_clip_tags(corpus, id, vocab));
    return s;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"avact: weakly-supervised instrument action localization"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; flags override it");
    app.allow_config_extras(false);

    Common common;
    app.add_option("--kernels", common.kernels, "Compute kernel variant")
        ->check(CLI::IsMember({"scalar", "avx2", "auto"}));
    app.add_option("--jobs", common.jobs, "Worker threads for per-clip work")->check(CLI::PositiveNumber);

    // ---------------------------------------------------------- synth
    auto* synth = app.add_subcommand("synth", "Generate the two-class synthetic corpus");
    std::string synth_out;
    int synth_train = 60, synth_test = 20;
    std::uint64_t synth_seed = 1;
    double synth_train_s = 62.0, synth_test_s = 22.0;
    synth->add_option("--out", synth_out, "Corpus root")->required();
    synth->add_option("--train-clips", synth_train);
    synth->add_option("--test-clips", synth_test);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--train-seconds", synth_train_s);
    synth->add_option("--test-seconds", synth_test_s);

    // ------------------------------------------------------- features
    auto* features = app.add_subcommand("features", "Extract mel and optical-flow features");
    std::string feat_corpus;
    double feat_fps = 7.8125;
    features->add_option("--corpus", feat_corpus)->required();
    features->add_option("--flow-fps", feat_fps, "Flow temporal resolution");

    // ---------------------------------------------------------- train
    auto* train = app.add_subcommand("train", "Train the sound, object, or action model");
    std::string tr_kind, tr_corpus, tr_out, tr_preset = "mini", tr_mode = "VT";
    std::string tr_sound_model, tr_object_model, tr_init_model, tr_run_name;
    std::uint64_t tr_seed = 1;
    int tr_epochs = -1, tr_freeze = -1, tr_batch = 4;
    double tr_lr = -1.0, tr_momentum = -1.0, tr_v = -1.0, tr_u = -1.0;
    double tr_flow_fps = 7.8125, tr_val_frac = 0.2;
    train->add_option("--kind", tr_kind)->required()->check(CLI::IsMember({"sound", "object", "action"}));
    train->add_option("--corpus", tr_corpus)->required();
    train->add_option("--out", tr_out)->required();
    train->add_option("--preset", tr_preset)->check(CLI::IsMember({"mini", "paper"}));
    train->add_option("--mode", tr_mode, "Supervision scheme (action)")
        ->check(CLI::IsMember({"VT", "OT", "ST", "SOT"}));
    train->add_option("--sound-threshold", tr_v, "v, for ST/SOT");
    train->add_option("--object-threshold", tr_u, "u, for OT/SOT");
    train->add_option("--sound-model", tr_sound_model, "Sound teacher run/checkpoint dir");
    train->add_option("--object-model", tr_object_model, "Object teacher run/checkpoint dir");
    train->add_option("--init-model", tr_init_model, "Warm-start checkpoint (fine-tuning)");
    train->add_option("--seed", tr_seed);
    train->add_option("--epochs", tr_epochs);
    train->add_option("--freeze-epochs", tr_freeze);
    train->add_option("--lr", tr_lr);
    train->add_option("--momentum", tr_momentum);
    train->add_option("--batch", tr_batch, "Clip batch (sound)");
    train->add_option("--flow-fps", tr_flow_fps);
    train->add_option("--val-frac", tr_val_frac);
    train->add_option("--run-name", tr_run_name);

    // -------------------------------------------------------- predict
    auto* predict = app.add_subcommand("predict", "Write activation maps for a split");
    std::string pr_kind, pr_model, pr_corpus, pr_out, pr_preset = "mini", pr_split = "test_";
    double pr_flow_fps = 7.8125;
    predict->add_option("--kind", pr_kind)->required()->check(CLI::IsMember({"sound", "object", "action"}));
    predict->add_option("--model", pr_model)->required();
    predict->add_option("--corpus", pr_corpus)->required();
    predict->add_option("--out", pr_out)->required();
    predict->add_option("--preset", pr_preset)->check(CLI::IsMember({"mini", "paper"}));
    predict->add_option("--split", pr_split, "Clip id prefix");
    predict->add_option("--flow-fps", pr_flow_fps);

    // -------------------------------------------------------- targets
    auto* targets = app.add_subcommand("targets", "Materialize training targets for inspection");
    std::string tg_corpus, tg_out, tg_mode = "SOT", tg_sound_model, tg_object_model, tg_preset = "mini";
    double tg_v = 0.5, tg_u = 0.3, tg_flow_fps = 7.8125;
    std::string tg_split = "train_";
    targets->add_option("--corpus", tg_corpus)->required();
    targets->add_option("--out", tg_out)->required();
    targets->add_option("--mode", tg_mode)->check(CLI::IsMember({"VT", "OT", "ST", "SOT"}));
    targets->add_option("--sound-threshold", tg_v);
    targets->add_option("--object-threshold", tg_u);
    targets->add_option("--sound-model", tg_sound_model);
    targets->add_option("--object-model", tg_object_model);
    targets->add_option("--preset", tg_preset)->check(CLI::IsMember({"mini", "paper"}));
    targets->add_option("--split", tg_split);
    targets->add_option("--flow-fps", tg_flow_fps);

    // ----------------------------------------------------------- fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "Pointwise fusion of prediction streams");
    std::string fu_action, fu_object, fu_sound, fu_out, fu_mode = "AOS";
    fuse_cmd->add_option("--action", fu_action)->required();
    fuse_cmd->add_option("--object", fu_object);
    fuse_cmd->add_option("--sound", fu_sound);
    fuse_cmd->add_option("--out", fu_out)->required();
    fuse_cmd->add_option("--mode", fu_mode)->check(CLI::IsMember({"A", "AO", "AS", "AOS"}));

    // ------------------------------------------------------- evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against annotations");
    std::string ev_pred, ev_anno, ev_vocab, ev_csv;
    evaluate->add_option("--pred", ev_pred)->required();
    evaluate->add_option("--anno", ev_anno)->required();
    evaluate->add_option("--vocab", ev_vocab,
                         "Directory holding vocabulary.json (default: parent of --anno)");
    evaluate->add_option("--csv", ev_csv, "Report CSV path (default: <pred>/eval_report.csv)");

    // ------------------------------------------------------------ viz
    auto* viz = app.add_subcommand("viz", "Conv1 trajectories and characterizing filters");
    std::string vz_model, vz_out, vz_preset = "mini", vz_corpus, vz_split = "test_";
    int vz_in_ch = 10, vz_classes = 2;
    bool vz_characterize = false;
    viz->add_option("--model", vz_model)->required();
    viz->add_option("--out", vz_out)->required();
    viz->add_option("--preset", vz_preset)->check(CLI::IsMember({"mini", "paper"}));
    viz->add_option("--in-channels", vz_in_ch);
    viz->add_option("--classes", vz_classes);
    viz->add_flag("--characterize", vz_characterize, "Also rank characterizing filters");
    viz->add_option("--corpus", vz_corpus, "Needed with --characterize");
    viz->add_option("--split", vz_split);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }
    kern::select(common.kernels);

    if (*synth) {
        pipeline::make_two_class_corpus(synth_out, synth_train, synth_test, synth_seed,
                                        synth_train_s, synth_test_s, common.jobs);
        write_manifest(synth_out, "synth", synth_seed,
                       {{"train_clips", synth_train}, {"test_clips", synth_test}});
        std::cerr << "synth: wrote " << synth_train << "+" << synth_test << " clips to " << synth_out
                  << "\n";
        return 0;
    }

    if (*features) {
        pipeline::extract_features(feat_corpus, feat_fps, common.jobs);
        std::cerr << "features: mel + flow(" << pipeline::flow_tag(feat_fps) << ") under "
                  << feat_corpus << "/features\n";
        return 0;
    }

    if (*train) {
        const fs::path corpus = tr_corpus;
        const auto vocab = pipeline::read_vocab(corpus);
        const int G = static_cast<int>(vocab.size());
        auto split = load_split(corpus, "train_", vocab);
        const std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                               std::lround(tr_val_frac * split.ids.size())));
        const std::size_t n_train = split.ids.size() - n_val;
        Split tr{{split.ids.begin(), split.ids.begin() + static_cast<std::ptrdiff_t>(n_train)},
                 {split.tags.begin(), split.tags.begin() + static_cast<std::ptrdiff_t>(n_train)}};
        Split va{{split.ids.begin() + static_cast<std::ptrdiff_t>(n_train), split.ids.end()},
                 {split.tags.begin() + static_cast<std::ptrdiff_t>(n_train), split.tags.end()}};
        const pipeline::FeatureStore store(corpus);

        TrainSchedule sched = tr_kind == "sound"    ? TrainSchedule::sound_default()
                              : tr_kind == "object" ? TrainSchedule::object_default()
                                                    : TrainSchedule::action_default();
        if (tr_epochs > 0) sched.epochs = tr_epochs;
        if (tr_freeze >= 0) sched.freeze_epochs = tr_freeze;
        if (tr_lr > 0) sched.lr = tr_lr;
        if (tr_momentum >= 0) sched.momentum = tr_momentum;

        std::string run_name = tr_run_name;
        TrainResult result;
        if (tr_kind == "sound") {
            if (run_name.empty()) run_name = "sound";
            const fs::path out = fs::path(tr_out) / run_name;
            SoundNet net(tr_preset == "paper" ? SoundNetConfig::paper(G) : SoundNetConfig::mini(G), tr_seed);
            result = train_sound(net, pipeline::sound_items(store, tr.ids, tr.tags),
                                 pipeline::sound_items(store, va.ids, va.tags), sched, tr_seed, out,
                                 tr_batch);
            write_manifest(out, "train sound", tr_seed, {{"config_hash", net.config().hash()}});
        } else if (tr_kind == "object") {
            if (run_name.empty()) run_name = "object";
            const fs::path out = fs::path(tr_out) / run_name;
            VisualNet net(tr_preset == "paper" ? VisualNetConfig::paper(3, G) : VisualNetConfig::mini(3, G),
                          tr_seed);
            const auto train_ds = pipeline::visual_dataset(store, tr.ids, tr.tags, false, tr_flow_fps);
            const auto val_ds = pipeline::visual_dataset(store, va.ids, va.tags, false, tr_flow_fps);
            result = train_visual(net, train_ds, val_ds, sched, tr_seed, out);
            write_manifest(out, "train object", tr_seed, {{"config_hash", net.config().hash()}});
        } else {
            TargetSpec spec;
            spec.mode = parse_target_mode(tr_mode);
            if (tr_v >= 0) spec.sound_threshold = tr_v;
            if (tr_u >= 0) spec.object_threshold = tr_u;
            spec.validate();
            if (run_name.empty()) run_name = spec.canonical_name();
            const fs::path out = fs::path(tr_out) / run_name;

            std::optional<VisualNet> obj_net;
            std::optional<SoundNet> snd_net;
            if (!tr_object_model.empty()) obj_net.emplace(load_visual(tr_object_model, tr_preset, 3, G));
            if (!tr_sound_model.empty()) snd_net.emplace(load_sound(tr_sound_model, tr_preset, G));
            std::vector<Target> tgts;
            const std::vector<Target>* tgts_ptr = nullptr;
            if (spec.mode != TargetMode::VT) {
                std::cerr << "train: building " << spec.canonical_name() << " targets for "
                          << tr.ids.size() << " clips\n";
                tgts = pipeline::action_targets(spec, store, tr.ids, tr.tags, tr_flow_fps,
                                                obj_net ? &*obj_net : nullptr,
                                                snd_net ? &*snd_net : nullptr);
                tgts_ptr = &tgts;
            }
            VisualNet net(tr_preset == "paper" ? VisualNetConfig::paper(10, G)
                                               : VisualNetConfig::mini(10, G),
                          tr_seed);
            if (!tr_init_model.empty()) load_checkpoint(net.state(), resolve_checkpoint(tr_init_model));
            const auto train_ds =
                pipeline::visual_dataset(store, tr.ids, tr.tags, true, tr_flow_fps, tgts_ptr);
            const auto val_ds = pipeline::visual_dataset(store, va.ids, va.tags, true, tr_flow_fps);
            result = train_visual(net, train_ds, val_ds, sched, tr_seed, out);
            write_manifest(out, "train action " + spec.canonical_name(), tr_seed,
                           {{"config_hash", net.config().hash()}, {"flow_fps", tr_flow_fps}});
        }
        const auto& best = result.best();
        std::cerr << "train: " << run_name << " best epoch " << best.epoch << " val AUC "
                  << best.val_clip_auc << (result.diverged ? " (diverged early)" : "") << "\n";
        return 0;
    }

    if (*predict) {
        const fs::path corpus = pr_corpus;
        const auto vocab = pipeline::read_vocab(corpus);
        const int G = static_cast<int>(vocab.size());
        const auto split = load_split(corpus, pr_split, vocab);
        const pipeline::FeatureStore store(corpus);
        fs::create_directories(pr_out);
        if (pr_kind == "sound") {
            SoundNet net = load_sound(pr_model, pr_preset, G);
            for (const auto& id : split.ids) {
                const auto snd = pipeline::sound_activation(net, store.mel(id));
                save_tensor(snd.data, fs::path(pr_out) / (id + ".sound.tnsr"));
            }
        } else {
            VisualNet net = load_visual(pr_model, pr_preset, pr_kind == "object" ? 3 : 10, G);
            for (const auto& id : split.ids) {
                const Tensor frames = pr_kind == "object" ? store.rgb_frames(id)
                                                          : store.flow_frames(id, pr_flow_fps);
                save_map(pipeline::map_from_frames(net, frames,
                                                   pr_kind == "object" ? Modality::object
                                                                       : Modality::action),
                         pr_out, id);
            }
        }
        write_manifest(pr_out, "predict " + pr_kind, 0, {{"model", pr_model}, {"split", pr_split}});
        std::cerr << "predict: " << split.ids.size() << " clips -> " << pr_out << "\n";
        return 0;
    }

    if (*targets) {
        const fs::path corpus = tg_corpus;
        const auto vocab = pipeline::read_vocab(corpus);
        const int G = static_cast<int>(vocab.size());
        const auto split = load_split(corpus, tg_split, vocab);
        const pipeline::FeatureStore store(corpus);
        TargetSpec spec;
        spec.mode = parse_target_mode(tg_mode);
        spec.sound_threshold = tg_v;
        spec.object_threshold = tg_u;
        spec.validate();
        std::optional<VisualNet> obj_net;
        std::optional<SoundNet> snd_net;
        if (!tg_object_model.empty()) obj_net.emplace(load_visual(tg_object_model, tg_preset, 3, G));
        if (!tg_sound_model.empty()) snd_net.emplace(load_sound(tg_sound_model, tg_preset, G));
        const auto tgts = pipeline::action_targets(spec, store, split.ids, split.tags, tg_flow_fps,
                                                   obj_net ? &*obj_net : nullptr,
                                                   snd_net ? &*snd_net : nullptr);
        fs::create_directories(tg_out);
        for (std::size_t c = 0; c < split.ids.size(); ++c)
            save_tensor(tgts[c].data, fs::path(tg_out) / (split.ids[c] + "." + spec.canonical_name() +
                                                          ".target.tnsr"));
        write_manifest(tg_out, "targets " + spec.canonical_name(), 0, {{"split", tg_split}});
        std::cerr << "targets: " << split.ids.size() << " clips -> " << tg_out << "\n";
        return 0;
    }

    if (*fuse_cmd) {
        const FusionMode mode = parse_fusion_mode(fu_mode);
        fs::create_directories(fu_out);
        for (const auto& id : map_ids(fu_action)) {
            const ActivationMap action = read_map(fu_action, id);
            std::optional<ActivationMap> object;
            std::optional<SoundActivation> sound;
            if (!fu_object.empty()) object = read_map(fu_object, id);
            if (!fu_sound.empty()) {
                SoundActivation s;
                s.data = load_tensor(fs::path(fu_sound) / (id + ".sound.tnsr"));
                s.fps = action.fps;
                pipeline::crop_time(s, std::min(s.times(), action.times()));
                sound = std::move(s);
            }
            ActivationMap a = action;
            if (sound) pipeline::crop_time(a, sound->times());
            if (object) pipeline::crop_time(*object, a.times());
            save_map(fuse(mode, a, object ? &*object : nullptr, sound ? &*sound : nullptr), fu_out, id);
        }
        write_manifest(fu_out, "fuse " + fu_mode, 0, {{"action", fu_action}});
        std::cerr << "fuse: mode " << fu_mode << " -> " << fu_out << "\n";
        return 0;
    }

    if (*evaluate) {
        const auto ids = map_ids(ev_pred);
        if (ids.empty()) throw NoValidClips("no .map.tnsr files under " + ev_pred);
        const fs::path anno_dir = ev_anno;
        const fs::path vocab_dir = ev_vocab.empty() ? anno_dir.parent_path() : fs::path(ev_vocab);
        const auto vocab = pipeline::read_vocab(vocab_dir);
        const auto first = load_annotations(anno_dir / (ids.front() + ".json"));
        Evaluator eval(vocab, first.height, first.width);
        for (const auto& id : ids)
            eval.add_clip(read_map(ev_pred, id), load_annotations(anno_dir / (id + ".json")));
        const EvalReport report = eval.report();
        report.print_table(std::cout);
        const fs::path csv = ev_csv.empty() ? fs::path(ev_pred) / "eval_report.csv" : fs::path(ev_csv);
        report.write_csv(csv);
        std::cerr << "evaluate: report -> " << csv << "\n";
        return 0;
    }

    if (*viz) {
        const auto out = fs::path(vz_out);
        fs::create_directories(out);
        VisualNet net = load_visual(vz_model, vz_preset, vz_in_ch, vz_classes);
        if (vz_in_ch == 10) {
            const auto traj = visualize_conv1(net.conv1_weights(), out / "conv1_trajectories.svg");
            std::cerr << "viz: " << traj.size() << " trajectories -> " << out << "\n";
        }
        if (vz_characterize) {
            if (vz_corpus.empty()) throw ConfigError("--characterize needs --corpus");
            const fs::path corpus = vz_corpus;
            const auto vocab = pipeline::read_vocab(corpus);
            const auto split = load_split(corpus, vz_split, vocab);
            const pipeline::FeatureStore store(corpus);
            std::vector<std::vector<std::vector<double>>> per_instrument(vocab.size());
            for (const auto& id : split.ids) {
                const auto anno = load_annotations(corpus / "annotations" / (id + ".json"));
                const Tensor frames = vz_in_ch == 10 ? store.flow_frames(id, 7.8125)
                                                     : store.rgb_frames(id);
                const auto maxima = filter_maxima(net, frames);
                for (std::size_t g = 0; g < vocab.size(); ++g)
                    for (std::size_t n = 0; n < std::min(maxima.size(), static_cast<std::size_t>(
                                                                            anno.frame_indices().size()));
                         ++n)
                        if (anno.positive(static_cast<int>(n), vocab.name(g)))
                            per_instrument[g].push_back(maxima[n]);
            }
            const auto cf = rank_characterizing(vocab, per_instrument,
                                                static_cast<std::size_t>(net.conv1_weights().dim(0)));
            write_ranking_csv(cf, out / "characterizing_filters.csv");
            plot_characterizing(cf, out / "characterizing_filters.svg");
            std::cerr << "viz: characterizing ranking -> " << out << "\n";
        }
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const avact::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
