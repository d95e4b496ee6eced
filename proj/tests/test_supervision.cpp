#include <doctest.h>

#include <cmath>
#include <random>

#include "avact/clip.hpp"
#include "avact/supervision.hpp"
#include "avact/training.hpp"

using namespace avact;

namespace {

Tensor tensor_of(std::initializer_list<double> vals) {
    Tensor t({vals.size()});
    std::size_t i = 0;
    for (double v : vals) t[i++] = v;
    return t;
}

ClipTags tags2(int a, int b) {
    ClipTags t;
    t.v = {a, b};
    return t;
}

}  // namespace

TEST_CASE("binarize is an inclusive threshold") {
    const auto out = binarize(tensor_of({0.49, 0.50, 0.51}), 0.5);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 1.0);  // exactly at threshold counts as positive
    CHECK(out[2] == 1.0);
    CHECK(binarize(tensor_of({0.35}), 0.3)[0] == 1.0);
    CHECK(binarize(tensor_of({0.35}), 0.5)[0] == 0.0);
    CHECK_THROWS_AS(binarize(tensor_of({0.5}), 0.0), ThresholdOutOfRange);
    CHECK_THROWS_AS(binarize(tensor_of({0.5}), 1.0), ThresholdOutOfRange);
    CHECK_THROWS_AS(binarize(tensor_of({0.5}), -0.2), ThresholdOutOfRange);
}

TEST_CASE("target specs: canonical names and validation") {
    CHECK(TargetSpec{TargetMode::VT, {}, {}}.canonical_name() == "VT");
    CHECK(TargetSpec{TargetMode::ST, 0.5, {}}.canonical_name() == "ST05");
    CHECK(TargetSpec{TargetMode::OT, {}, 0.3}.canonical_name() == "OT03");
    CHECK(TargetSpec{TargetMode::SOT, 0.5, 0.3}.canonical_name() == "SOT0503");
    CHECK(TargetSpec{TargetMode::SOT, 0.25, 0.3}.canonical_name() == "SOT02503");

    const TargetSpec missing_v{TargetMode::SOT, {}, 0.3};
    const TargetSpec extra_v{TargetMode::VT, 0.5, {}};
    const TargetSpec out_of_range{TargetMode::OT, {}, 1.5};
    CHECK_THROWS_AS(missing_v.validate(), ConfigError);
    CHECK_THROWS_AS(extra_v.validate(), ConfigError);
    CHECK_THROWS_AS(out_of_range.validate(), ThresholdOutOfRange);

    CHECK(parse_target_mode("SOT") == TargetMode::SOT);
    CHECK_THROWS_AS(parse_target_mode("XYZ"), ConfigError);
}

namespace {

// Small teacher pair: 2 classes, 3 time steps, 2x2 grid.
ActivationMap toy_object() {
    ActivationMap m;
    m.data = Tensor({2, 3, 2, 2});
    m.fps = kAnchorFps;
    m.modality = Modality::object;
    // class 0: cell (0,1) confident at every t; class 1: everything weak
    for (std::size_t t = 0; t < 3; ++t) {
        m.data.at(std::size_t{0}, t, std::size_t{0}, std::size_t{1}) = 0.9;
        m.data.at(std::size_t{0}, t, std::size_t{1}, std::size_t{0}) = 0.2;
        m.data.at(std::size_t{1}, t, std::size_t{0}, std::size_t{0}) = 0.1;
    }
    return m;
}

SoundActivation toy_sound() {
    SoundActivation s;
    s.data = Tensor({2, 3});
    s.fps = kAnchorFps;
    // class 0 sounds only at t=1; class 1 never
    s.data.at(std::size_t{0}, std::size_t{1}) = 0.8;
    return s;
}

}  // namespace

TEST_CASE("build_target VT broadcasts the video tags") {
    const auto t = build_target({TargetMode::VT, {}, {}}, tags2(1, 0), nullptr, nullptr);
    CHECK(t.comparison == ComparisonMode::spatial_max);
    REQUIRE(t.data.dims() == std::vector<std::size_t>{2, 1});
    CHECK(t.data.at(std::size_t{0}, std::size_t{0}) == 1.0);
    CHECK(t.data.at(std::size_t{1}, std::size_t{0}) == 0.0);
}

TEST_CASE("build_target ST thresholds the sound teacher per frame") {
    const auto snd = toy_sound();
    const auto t = build_target({TargetMode::ST, 0.5, {}}, tags2(1, 1), nullptr, &snd);
    CHECK(t.comparison == ComparisonMode::spatial_max);
    REQUIRE(t.data.dims() == std::vector<std::size_t>{2, 3});
    CHECK(t.data.at(std::size_t{0}, std::size_t{0}) == 0.0);
    CHECK(t.data.at(std::size_t{0}, std::size_t{1}) == 1.0);
    CHECK(t.data.at(std::size_t{1}, std::size_t{2}) == 0.0);
}

TEST_CASE("build_target OT thresholds the object map per cell") {
    const auto obj = toy_object();
    const auto t = build_target({TargetMode::OT, {}, 0.3}, tags2(1, 1), &obj, nullptr);
    CHECK(t.comparison == ComparisonMode::spatial_map);
    REQUIRE(t.data.dims() == std::vector<std::size_t>{2, 3, 2, 2});
    CHECK(t.data.at(std::size_t{0}, std::size_t{0}, std::size_t{0}, std::size_t{1}) == 1.0);
    CHECK(t.data.at(std::size_t{0}, std::size_t{0}, std::size_t{1}, std::size_t{0}) == 0.0);
    CHECK(t.data.at(std::size_t{1}, std::size_t{0}, std::size_t{0}, std::size_t{0}) == 0.0);
}

TEST_CASE("build_target SOT gates the object target by the sound mask") {
    const auto obj = toy_object();
    const auto snd = toy_sound();
    const auto t = build_target({TargetMode::SOT, 0.5, 0.3}, tags2(1, 1), &obj, &snd);
    CHECK(t.comparison == ComparisonMode::spatial_map);
    REQUIRE(t.data.dims() == std::vector<std::size_t>{2, 3, 2, 2});
    // silent frames are all-zero even where the object is confident
    CHECK(t.data.at(std::size_t{0}, std::size_t{0}, std::size_t{0}, std::size_t{1}) == 0.0);
    // sounding frame keeps the object pattern
    CHECK(t.data.at(std::size_t{0}, std::size_t{1}, std::size_t{0}, std::size_t{1}) == 1.0);
    CHECK(t.data.at(std::size_t{0}, std::size_t{1}, std::size_t{1}, std::size_t{0}) == 0.0);
    // class 1 never sounds -> all zero
    for (std::size_t i = 12; i < 24; ++i) CHECK(t.data[i] == 0.0);
}

TEST_CASE("build_target rejects missing or mismatched teachers") {
    const auto obj = toy_object();
    const auto snd = toy_sound();
    CHECK_THROWS_AS(build_target({TargetMode::SOT, 0.5, 0.3}, tags2(1, 1), &obj, nullptr),
                    MissingAuxiliary);
    CHECK_THROWS_AS(build_target({TargetMode::OT, {}, 0.3}, tags2(1, 1), nullptr, nullptr),
                    MissingAuxiliary);
    SoundActivation short_snd;
    short_snd.data = Tensor({2, 2});
    CHECK_THROWS_AS(build_target({TargetMode::SOT, 0.5, 0.3}, tags2(1, 1), &obj, &short_snd),
                    ShapeMismatch);
    ClipTags three;
    three.v = {1, 0, 1};
    CHECK_THROWS_AS(build_target({TargetMode::OT, {}, 0.3}, three, &obj, nullptr), ShapeMismatch);
}

TEST_CASE("binary cross-entropy: reference values and clipping") {
    CHECK(bce_loss(tensor_of({0.5}), tensor_of({1.0})) == doctest::Approx(0.6931472).epsilon(1e-6));
    // fully wrong, fully confident: clipped at 1e-7 -> -ln(1e-7)
    CHECK(bce_loss(tensor_of({1.0}), tensor_of({0.0})) == doctest::Approx(16.1180957).epsilon(1e-6));
    CHECK(bce_loss(tensor_of({0.0}), tensor_of({1.0})) == doctest::Approx(16.1180957).epsilon(1e-6));
    // perfect prediction is (numerically) free
    CHECK(bce_loss(tensor_of({1.0, 0.0}), tensor_of({1.0, 0.0})) < 1e-6);
    // mean reduction
    CHECK(bce_loss(tensor_of({0.5, 0.5}), tensor_of({1.0, 0.0})) ==
          doctest::Approx(0.6931472).epsilon(1e-6));
    CHECK_THROWS_AS(bce_loss(tensor_of({0.5}), tensor_of({0.5, 0.5})), ShapeMismatch);
}

TEST_CASE("bce gradient matches finite differences and flattens at the clip") {
    const auto p = tensor_of({0.2, 0.7, 0.95});
    const auto q = tensor_of({0.0, 1.0, 1.0});
    const auto g = bce_grad(p, q);
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto pp = p, pm = p;
        pp[i] += 1e-7;
        pm[i] -= 1e-7;
        const double fd = (bce_loss(pp, q) - bce_loss(pm, q)) / 2e-7;
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-4));
    }
    CHECK(bce_grad(tensor_of({1.0}), tensor_of({0.0}))[0] == 0.0);  // clipped region is flat
}

TEST_CASE("spatial max and its subgradient routing") {
    Tensor frame({1, 2, 2});
    frame.at(std::size_t{0}, std::size_t{0}, std::size_t{1}) = 0.8;
    CHECK(spatial_max(frame)[0] == 0.8);
    CHECK_THROWS_AS(spatial_max(Tensor({2, 2})), ShapeMismatch);

    // ties go to the first cell in row-major order
    Tensor maps({1, 1, 2, 2});
    for (std::size_t i = 0; i < 4; ++i) maps[i] = 0.6;
    SpatialMaxPool pool;
    const auto y = pool.forward(maps);
    CHECK(y.at(std::size_t{0}, std::size_t{0}) == 0.6);
    Tensor gy({1, 1});
    gy[0] = 2.0;
    const auto gx = pool.backward(gy);
    CHECK(gx[0] == 2.0);
    for (std::size_t i = 1; i < 4; ++i) CHECK(gx[i] == 0.0);
}

TEST_CASE("training schedules: published defaults") {
    const auto snd = TrainSchedule::sound_default();
    CHECK(snd.optimizer == TrainSchedule::Opt::adagrad);
    CHECK(snd.lr == 0.01);

    const auto obj = TrainSchedule::object_default();
    CHECK(obj.optimizer == TrainSchedule::Opt::sgd_momentum);
    CHECK(obj.lr == 0.001);
    CHECK(obj.momentum == 0.9);
    CHECK(obj.freeze_epochs == 20);
    CHECK(obj.epochs == 50);  // 20 frozen + 30 unfrozen

    const auto act = TrainSchedule::action_default();
    CHECK(act.epochs == 100);
    CHECK(act.freeze_epochs == 0);

    TrainSchedule bad = act;
    bad.lr = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = act;
    bad.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("best epoch: highest validation AUC, earliest on ties") {
    TrainResult r;
    r.epochs = {{1, 0.9, 0.6, "a"}, {2, 0.5, 0.8, "b"}, {3, 0.4, 0.7, "c"}};
    CHECK(r.best().epoch == 2);
    r.epochs = {{1, 0.9, 0.8, "a"}, {2, 0.5, 0.8, "b"}};
    CHECK(r.best().epoch == 1);
    TrainResult empty;
    CHECK_THROWS_AS(empty.best(), NoCheckpoints);
}

TEST_CASE("clip-level AUC skips one-label classes") {
    // class 0 separable, class 1 reversed, class 2 all-positive (skipped)
    std::vector<std::vector<double>> scores = {
        {0.9, 0.1, 0.5}, {0.2, 0.8, 0.5}, {0.8, 0.3, 0.5}, {0.1, 0.9, 0.5}};
    std::vector<ClipTags> tags(4);
    tags[0].v = {1, 1, 1};
    tags[1].v = {0, 0, 1};
    tags[2].v = {1, 1, 1};
    tags[3].v = {0, 0, 1};
    CHECK(clip_level_auc(scores, tags) == doctest::Approx(0.5));  // (1.0 + 0.0) / 2

    // no scorable class at all -> chance
    std::vector<ClipTags> all_pos(4);
    for (auto& t : all_pos) t.v = {1, 1, 1};
    CHECK(clip_level_auc(scores, all_pos) == 0.5);
}

TEST_CASE("optimizer semantics on a toy parameter") {
    bool frozen = false, ice = true;
    Tensor w({2}), g({2}), w2({2}), g2({2});
    w[0] = 1.0, w[1] = -1.0;
    g[0] = 0.5, g[1] = -0.25;
    w2[0] = 3.0;
    g2[0] = 10.0;
    std::vector<ParamRef> params = {{"a", &w, &g, &frozen}, {"b", &w2, &g2, &ice}};

    SUBCASE("sgd with momentum") {
        TrainSchedule s;
        s.optimizer = TrainSchedule::Opt::sgd_momentum;
        s.lr = 0.1;
        s.momentum = 0.9;
        auto opt = Optimizer::make(s);
        opt->step(params);
        CHECK(w[0] == doctest::Approx(1.0 - 0.1 * 0.5));
        CHECK(w[1] == doctest::Approx(-1.0 + 0.1 * 0.25));
        opt->step(params);  // velocity carries over: v2 = 0.9*v1 - lr*g
        CHECK(w[0] == doctest::Approx(0.95 + 0.9 * (-0.05) - 0.05));
        CHECK(w2[0] == 3.0);  // frozen parameter untouched
    }
    SUBCASE("adagrad normalizes by accumulated gradient magnitude") {
        TrainSchedule s;
        s.optimizer = TrainSchedule::Opt::adagrad;
        s.lr = 0.01;
        auto opt = Optimizer::make(s);
        opt->step(params);
        // first step: w -= lr * g / (|g| + 1e-10) = lr * sign(g)
        CHECK(w[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-7));
        CHECK(w[1] == doctest::Approx(-1.0 + 0.01).epsilon(1e-7));
        opt->step(params);
        // second step shrinks: h = 2 g^2 -> step lr/sqrt(2)
        CHECK(w[0] == doctest::Approx(1.0 - 0.01 - 0.01 / std::sqrt(2.0)).epsilon(1e-7));
        CHECK(w2[0] == 3.0);
    }
}

TEST_CASE("one small step along the gradient reduces the loss accordingly") {
    VisualNet net(VisualNetConfig::mini(3, 2), 13);
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(0, 1);
    Tensor x({2, 3, 32, 32});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = u(rng);
    Tensor q({2, 2});
    q.at(std::size_t{0}, std::size_t{0}) = 1.0;
    q.at(std::size_t{1}, std::size_t{1}) = 1.0;

    SpatialMaxPool pool;
    net.zero_grad();
    const auto p0 = pool.forward(net.forward(x, true));
    const double loss0 = bce_loss(p0, q);
    net.backward(pool.backward(bce_grad(p0, q)));

    double grad_sq = 0.0;
    for (const auto& pr : net.params())
        for (std::size_t i = 0; i < pr.grad->size(); ++i) grad_sq += (*pr.grad)[i] * (*pr.grad)[i];
    REQUIRE(grad_sq > 0.0);

    const double lr = 1e-4;
    TrainSchedule s;
    s.lr = lr;
    s.momentum = 0.0;
    Optimizer::make(s)->step(net.params());

    SpatialMaxPool pool2;
    const double loss1 = bce_loss(pool2.forward(net.forward(x, true)), q);
    const double predicted_drop = lr * grad_sq;
    CHECK(loss1 < loss0);
    CHECK(loss0 - loss1 == doctest::Approx(predicted_drop).epsilon(0.2));
}
