#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "avact/clip.hpp"
#include "avact/fusion.hpp"
#include "avact/metrics.hpp"

using namespace avact;
namespace fs = std::filesystem;

namespace {

ActivationMap const_map(std::size_t G, std::size_t T, std::size_t I, std::size_t J, double v,
                        Modality m = Modality::action) {
    ActivationMap map;
    map.data = Tensor({G, T, I, J});
    for (std::size_t i = 0; i < map.data.size(); ++i) map.data[i] = v;
    map.fps = kAnchorFps;
    map.stride = 32;
    map.modality = m;
    return map;
}

SoundActivation const_sound(std::size_t G, std::size_t T, double v) {
    SoundActivation s;
    s.data = Tensor({G, T});
    for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = v;
    s.fps = kAnchorFps;
    return s;
}

}  // namespace

// --------------------------------------------------------------- fusion

TEST_CASE("pointwise fusion: worked example 0.8 * 0.5 * 0.5 = 0.2") {
    const auto a = const_map(1, 1, 1, 1, 0.8);
    const auto o = const_map(1, 1, 1, 1, 0.5, Modality::object);
    const auto s = const_sound(1, 1, 0.5);
    CHECK(fuse(FusionMode::A, a, nullptr, nullptr).data[0] == doctest::Approx(0.8));
    CHECK(fuse(FusionMode::AO, a, &o, nullptr).data[0] == doctest::Approx(0.4));
    CHECK(fuse(FusionMode::AS, a, nullptr, &s).data[0] == doctest::Approx(0.4));
    CHECK(fuse(FusionMode::AOS, a, &o, &s).data[0] == doctest::Approx(0.2));
    CHECK(fuse(FusionMode::AOS, a, &o, &s).modality == Modality::fused);
}

TEST_CASE("fusion algebra: annihilator, identity, and monotone shrinkage") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    auto a = const_map(2, 3, 2, 2, 0);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] = u(rng);
    auto o = const_map(2, 3, 2, 2, 0, Modality::object);
    for (std::size_t i = 0; i < o.data.size(); ++i) o.data[i] = u(rng);
    auto s = const_sound(2, 3, 0);
    for (std::size_t i = 0; i < s.data.size(); ++i) s.data[i] = u(rng);

    // zero object annihilates
    const auto zero = const_map(2, 3, 2, 2, 0.0, Modality::object);
    const auto dead = fuse(FusionMode::AO, a, &zero, nullptr);
    CHECK(dead.data.max() == 0.0);

    // all-ones teachers leave the action stream untouched
    const auto ones_o = const_map(2, 3, 2, 2, 1.0, Modality::object);
    const auto ones_s = const_sound(2, 3, 1.0);
    const auto same = fuse(FusionMode::AOS, a, &ones_o, &ones_s);
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(same.data[i] == a.data[i]);

    // fusing never raises confidence: AOS <= AO <= A
    const auto ao = fuse(FusionMode::AO, a, &o, nullptr);
    const auto aos = fuse(FusionMode::AOS, a, &o, &s);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        CHECK(ao.data[i] <= a.data[i]);
        CHECK(aos.data[i] <= ao.data[i]);
    }

    // the sound term broadcasts over the spatial grid
    const auto as = fuse(FusionMode::AS, a, nullptr, &s);
    for (std::size_t g = 0; g < 2; ++g)
        for (std::size_t t = 0; t < 3; ++t)
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    CHECK(as.data.at(g, t, i, j) ==
                          doctest::Approx(a.data.at(g, t, i, j) * s.data.at(g, t)));
}

TEST_CASE("fusion input validation") {
    const auto a = const_map(2, 3, 2, 2, 0.5);
    const auto o = const_map(2, 3, 2, 2, 0.5, Modality::object);
    const auto s = const_sound(2, 3, 0.5);
    CHECK_THROWS_AS(fuse(FusionMode::AO, a, nullptr, nullptr), MissingAuxiliary);
    CHECK_THROWS_AS(fuse(FusionMode::AS, a, nullptr, nullptr), MissingAuxiliary);
    CHECK_THROWS_AS(fuse(FusionMode::AOS, a, &o, nullptr), MissingAuxiliary);
    const auto short_o = const_map(2, 2, 2, 2, 0.5, Modality::object);
    CHECK_THROWS_AS(fuse(FusionMode::AO, a, &short_o, nullptr), ShapeMismatch);
    const auto short_s = const_sound(2, 2, 0.5);
    CHECK_THROWS_AS(fuse(FusionMode::AS, a, nullptr, &short_s), ShapeMismatch);

    CHECK(parse_fusion_mode("AOS") == FusionMode::AOS);
    CHECK(fusion_mode_name(FusionMode::AS) == "AS");
    CHECK_THROWS_AS(parse_fusion_mode("OSA"), ConfigError);
}

// ------------------------------------------------------------ frame AUC

TEST_CASE("frame AUC: reference values and tie handling") {
    // tie between one positive and one negative -> 0.5 credit
    CHECK(*frame_auc({0.4, 0.4, 0.7}, {0, 1, 1}) == doctest::Approx(0.75));
    CHECK(*frame_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(*frame_auc({0.9, 0.8, 0.2, 0.1}, {0, 0, 1, 1}) == doctest::Approx(0.0));
    CHECK(*frame_auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == doctest::Approx(0.5));
    // degenerate clips carry no ranking information
    CHECK_FALSE(frame_auc({0.1, 0.9}, {1, 1}).has_value());
    CHECK_FALSE(frame_auc({0.1, 0.9}, {0, 0}).has_value());
    CHECK_THROWS_AS(frame_auc({0.1}, {0, 1}), ShapeMismatch);
}

TEST_CASE("frame AUC agrees with pairwise counting on random data") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::bernoulli_distribution coin(0.4);
    std::uniform_int_distribution<int> quant(0, 9);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
        bool pos = false, neg = false;
        for (int i = 0; i < 30; ++i) {
            scores.push_back(quant(rng) / 10.0);  // coarse grid forces ties
            const bool l = coin(rng);
            labels.push_back(l);
            (l ? pos : neg) = true;
        }
        if (!pos || !neg) continue;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i)
            for (std::size_t j = 0; j < scores.size(); ++j) {
                if (!(labels[i] && !labels[j])) continue;
                den += 1.0;
                if (scores[i] > scores[j]) num += 1.0;
                else if (scores[i] == scores[j]) num += 0.5;
            }
        CHECK(*frame_auc(scores, labels) == doctest::Approx(num / den).epsilon(1e-12));
    }
}

// ------------------------------------------------------ spatial metrics

TEST_CASE("bilinear upsampling is constant-preserving and peak-centered") {
    Tensor flat({2, 3});
    for (std::size_t i = 0; i < 6; ++i) flat[i] = 0.7;
    const auto up = upsample_bilinear(flat, 64, 96);
    REQUIRE(up.dims() == std::vector<std::size_t>{64, 96});
    CHECK(up.min() == doctest::Approx(0.7));
    CHECK(up.max() == doctest::Approx(0.7));

    // single hot cell at (0,1) of a 2x2 map on 32x32: peak lands in that quadrant
    Tensor hot({2, 2});
    hot.at(std::size_t{0}, std::size_t{1}) = 1.0;
    const auto loc = argmax_location(hot, 32, 32);
    CHECK(loc[0] >= 16);
    CHECK(loc[1] < 16);

    CHECK_THROWS_AS(upsample_bilinear(Tensor({2, 2, 2}), 8, 8), ShapeMismatch);
}

TEST_CASE("spatial distance: nearest key point from the peak") {
    // uniform 1x1 map -> upsampled argmax at pixel (0,0)
    Tensor one({1, 1});
    one[0] = 0.9;
    CHECK(spatial_distance(one, {{3.f, 4.f}}, 16, 16) == doctest::Approx(5.0));
    CHECK(spatial_distance(one, {{3.f, 4.f}, {0.f, 1.f}}, 16, 16) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spatial_distance(one, {}, 16, 16), EmptyKeypoints);
}

TEST_CASE("cell-center argmax policy") {
    Tensor m({2, 2});
    m.at(std::size_t{1}, std::size_t{0}) = 1.0;
    const auto loc = argmax_location(m, 64, 64, {true, 32});
    CHECK(loc[0] == doctest::Approx(16.0));  // col 0 center
    CHECK(loc[1] == doctest::Approx(48.0));  // row 1 center
}

TEST_CASE("object hit rate counts argmax-in-box images") {
    Tensor left({1, 2}), right({1, 2});
    left.at(std::size_t{0}, std::size_t{0}) = 1.0;
    right.at(std::size_t{0}, std::size_t{1}) = 1.0;
    const std::vector<Tensor> frames = {left, right};
    // boxes covering the left half only
    const std::vector<std::vector<Box>> boxes = {{{0, 0, 31, 63}}, {{0, 0, 31, 63}}};
    CHECK(object_hit_rate(frames, boxes, 64, 64) == doctest::Approx(0.5));
    CHECK_THROWS_AS(object_hit_rate(frames, {{}, {}}, 64, 64), NoBoxes);
    CHECK_THROWS_AS(object_hit_rate({}, {}, 64, 64), NoBoxes);
}

// -------------------------------------------------------- evaluator

namespace {

KeyPointAnnotationSet toy_anno() {
    KeyPointAnnotationSet anno;
    anno.clip_id = "c";
    anno.width = 64;
    anno.height = 64;
    // Cello positive on frames 1 and 3, Drum always negative
    anno.frames[0]["Cello"] = {};
    anno.frames[1]["Cello"] = {{8.f, 8.f}};
    anno.frames[2]["Cello"] = {};
    anno.frames[3]["Cello"] = {{8.f, 8.f}};
    for (int t = 0; t < 4; ++t) anno.frames[t]["Drum"] = {};
    return anno;
}

}  // namespace

TEST_CASE("frame positivity vector for one instrument") {
    const auto anno = toy_anno();
    CHECK(frame_positivity(anno, {0, 1, 2, 3}, "Cello") ==
          std::vector<std::uint8_t>{0, 1, 0, 1});
    CHECK(frame_positivity(anno, {3, 0}, "Cello") == std::vector<std::uint8_t>{1, 0});
    CHECK(frame_positivity(anno, {0, 1}, "Drum") == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("evaluator aggregates AUC and distance per class") {
    InstrumentVocabulary vocab({"Cello", "Drum"});
    Evaluator eval(vocab, 64, 64);

    // class 0 scores follow the labels exactly; peak in the top-left cell.
    // The upsampled map plateaus over that quadrant, so the first-row-major
    // argmax is pixel (0,0) and the distance to the (8,8) key point is
    // sqrt(128).
    auto map = const_map(2, 4, 2, 2, 0.0);
    for (std::size_t t : {1u, 3u})
        map.data.at(std::size_t{0}, t, std::size_t{0}, std::size_t{0}) = 0.9;
    eval.add_clip(map, toy_anno());

    const auto r = eval.report();
    REQUIRE(r.instruments == std::vector<std::string>{"Cello", "Drum"});
    CHECK(r.temporal_auc[0] == doctest::Approx(1.0));
    CHECK(r.auc_clips[0] == 1);
    // Drum has no positive frame in the clip: degenerate, skipped
    CHECK(std::isnan(r.temporal_auc[1]));
    CHECK(r.skipped_clips[1] == 1);
    CHECK(r.positive_frames[0] == 2);
    CHECK(r.spatial_px[0] == doctest::Approx(std::sqrt(128.0)));
    CHECK(r.average_auc() == doctest::Approx(1.0));

    // report artifacts
    const auto dir = fs::temp_directory_path() / ("avact_fe_" + std::to_string(std::rand()));
    fs::create_directories(dir);
    r.write_csv(dir / "report.csv");
    std::ifstream in(dir / "report.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "instrument,temporal_auc,spatial_px,n_clips,n_skipped,n_positive_frames");
    std::getline(in, line);
    CHECK(line.rfind("Cello,1,", 0) == 0);
    std::ostringstream table;
    r.print_table(table);
    CHECK(table.str().find("Average") != std::string::npos);
    CHECK(table.str().find("n/a") != std::string::npos);  // Drum row
    fs::remove_all(dir);
}

TEST_CASE("evaluator rejects class count mismatches and ignores out-of-range frames") {
    InstrumentVocabulary vocab({"Cello", "Drum"});
    Evaluator eval(vocab, 64, 64);
    const auto wrong = const_map(3, 4, 2, 2, 0.5);
    CHECK_THROWS_AS(eval.add_clip(wrong, toy_anno()), ShapeMismatch);

    // annotation frames beyond the map's T axis are dropped silently
    auto map = const_map(2, 2, 2, 2, 0.5);
    KeyPointAnnotationSet far;
    far.clip_id = "c";
    far.width = 64;
    far.height = 64;
    far.frames[10]["Cello"] = {{1.f, 1.f}};
    eval.add_clip(map, far);
    CHECK(eval.report().auc_clips[0] == 0);
}
