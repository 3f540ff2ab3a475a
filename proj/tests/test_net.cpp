#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "agc/net.hpp"

using namespace agc;

namespace {

Matrix single_row(const std::vector<double>& v) { return make_matrix({v}); }

}  // namespace

TEST_CASE("net_init: determinism and fan-in scaling") {
    const Net a = net_init({3, 8, 4}, 123);
    const Net b = net_init({3, 8, 4}, 123);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);

    const Net c = net_init({3, 8, 4}, 124);
    CHECK(a.w != c.w);

    for (size_t l = 0; l < a.w.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(a.sizes[l]));
        for (double w : a.w[l]) CHECK(std::abs(w) <= bound);
        for (double bias : a.b[l]) CHECK(bias == 0.0);
    }

    CHECK_THROWS_AS(net_init({5}, 1), ValidationError);
    CHECK_THROWS_AS(net_init({3, 0, 2}, 1), ValidationError);
}

TEST_CASE("forward: identity network reproduces its input") {
    Net net = net_init({3, 3}, 0);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) net.w[0][j * 3 + i] = (i == j) ? 1.0 : 0.0;
    const std::vector<double> x{0.5, -2.0, 7.25};
    const auto y = forward(net, x);
    CHECK(y == x);
}

TEST_CASE("forward: single linear neuron") {
    Net net = net_init({1, 1}, 0);
    net.w[0][0] = 2.0;
    net.b[0][0] = 1.0;
    CHECK(forward(net, {3.0})[0] == Catch::Approx(7.0));
}

TEST_CASE("forward: zero weights yield the (denormalized) bias") {
    Net net = net_init({4, 6, 2}, 3);
    for (auto& layer : net.w) std::fill(layer.begin(), layer.end(), 0.0);
    net.b.back() = {0.25, -1.5};
    net.out_mean = {1.0, 2.0};
    net.out_std = {2.0, 3.0};
    const auto y = forward(net, {1, 2, 3, 4});
    CHECK(y[0] == Catch::Approx(1.0 + 2.0 * 0.25));
    CHECK(y[1] == Catch::Approx(2.0 + 3.0 * -1.5));

    CHECK_THROWS_AS(forward(net, {1, 2, 3}), ValidationError);
}

TEST_CASE("train_mse memorizes a single sample") {
    Net net = net_init({2, 8, 1}, 5);
    const Matrix X = single_row({0.4, -0.2});
    const Matrix Y = single_row({0.7});
    TrainOptions opts;
    opts.lr = 0.05;
    opts.epochs = 2000;
    opts.batch = 1;
    opts.refit_normalization = false;
    const TrainReport rep = train_mse(net, X, Y, opts);
    CHECK(rep.final_train_loss < 1e-6);
    CHECK(rep.epochs_run == 2000);
}

TEST_CASE("train_mse with lr = 0 changes nothing") {
    Net net = net_init({2, 4, 1}, 6);
    const Net before = net;
    auto rng = make_rng(31);
    Matrix X(16, 2), Y(16, 1);
    for (int i = 0; i < 16; ++i) {
        X.row(i)[0] = rand_uniform(rng, -1, 1);
        X.row(i)[1] = rand_uniform(rng, -1, 1);
        Y.row(i)[0] = X.row(i)[0] - X.row(i)[1];
    }
    TrainOptions opts;
    opts.lr = 0.0;
    opts.epochs = 5;
    opts.refit_normalization = false;
    const TrainReport rep = train_mse(net, X, Y, opts);
    CHECK(net.w == before.w);
    CHECK(net.b == before.b);
    for (size_t e = 1; e < rep.loss_curve.size(); ++e)
        CHECK(rep.loss_curve[e] == Catch::Approx(rep.loss_curve[0]));
}

TEST_CASE("train_mse loss curve is reproducible for a fixed seed") {
    auto run = [&]() {
        Net net = net_init({3, 8, 2}, 11);
        auto rng = make_rng(77);
        Matrix X(64, 3), Y(64, 2);
        for (int i = 0; i < 64; ++i) {
            for (int j = 0; j < 3; ++j) X.row(i)[j] = rand_uniform(rng, -2, 2);
            Y.row(i)[0] = std::sin(X.row(i)[0]);
            Y.row(i)[1] = X.row(i)[1] * X.row(i)[2];
        }
        TrainOptions opts;
        opts.lr = 0.02;
        opts.epochs = 12;
        opts.seed = 9;
        return train_mse(net, X, Y, opts).loss_curve;
    };
    CHECK(run() == run());
}

TEST_CASE("train_mse aborts on divergence") {
    Net net = net_init({2, 8, 1}, 5);
    auto rng = make_rng(13);
    Matrix X(32, 2), Y(32, 1);
    for (int i = 0; i < 32; ++i) {
        X.row(i)[0] = rand_uniform(rng, -50, 50);
        X.row(i)[1] = rand_uniform(rng, -50, 50);
        Y.row(i)[0] = X.row(i)[0] * 10.0;
    }
    TrainOptions opts;
    opts.lr = 50.0; // absurd on purpose
    opts.epochs = 60;
    opts.refit_normalization = false;
    CHECK_THROWS_AS(train_mse(net, X, Y, opts), TrainingError);
}

TEST_CASE("gradient_check: random small nets stay within 1e-4") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Net net = net_init({4, 10, 6, 3}, seed);
        auto rng = make_rng(seed + 1000);
        std::vector<double> x(4), t(3);
        for (auto& v : x) v = rand_uniform(rng, -2, 2);
        for (auto& v : t) v = rand_uniform(rng, -2, 2);
        CHECK(gradient_check(net, x, t, 1e-4) <= 1e-4);
    }
}

TEST_CASE("gradient_check: linear net matches the closed form") {
    Net net = net_init({1, 1}, 0);
    net.w[0][0] = 1.3;
    net.b[0][0] = -0.4;
    const double x = 0.8, t = 2.0;

    NetWorkspace ws;
    NetGrads grads;
    zero_grads_like(net, grads);
    std::vector<double> dLdy;
    sample_loss_and_grad(net, &x, &t, ws, dLdy);
    backward_normalized(net, ws, dLdy, grads);
    const double resid = net.w[0][0] * x + net.b[0][0] - t;
    CHECK(grads.w[0][0] == Catch::Approx(2.0 * resid * x).epsilon(1e-12));
    CHECK(grads.b[0][0] == Catch::Approx(2.0 * resid).epsilon(1e-12));

    CHECK(gradient_check(net, {x}, {t}, 1e-5) <= 1e-9);
}

TEST_CASE("gradient_check: zero-gradient point") {
    Net net = net_init({1, 1}, 0);
    net.w[0][0] = 2.0;
    net.b[0][0] = 0.0;
    // prediction equals target -> gradient vanishes on both routes
    CHECK(gradient_check(net, {1.5}, {3.0}, 1e-5) <= 1e-9);
}

TEST_CASE("save/load round-trips forward outputs bitwise") {
    Net net = net_init({5, 16, 8, 2}, 42);
    Matrix X(40, 5), Y(40, 2);
    auto rng = make_rng(4);
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 5; ++j) X.row(i)[j] = rand_uniform(rng, -3, 100);
        Y.row(i)[0] = X.row(i)[0];
        Y.row(i)[1] = X.row(i)[4] * 0.01;
    }
    TrainOptions opts;
    opts.epochs = 5;
    train_mse(net, X, Y, opts);

    const auto dir = std::filesystem::temp_directory_path() / "agc_test_net";
    std::filesystem::create_directories(dir);
    const auto path = dir / "net.json";
    save_net(net, path);
    const Net back = load_net(path);
    for (int i = 0; i < 10; ++i) {
        std::vector<double> x(5);
        for (auto& v : x) v = rand_uniform(rng, -3, 100);
        const auto y0 = forward(net, x);
        const auto y1 = forward(back, x);
        CHECK(y0 == y1); // exact, not approximate
    }
}

TEST_CASE("load_net: truncated and mis-versioned files give structured errors") {
    const auto dir = std::filesystem::temp_directory_path() / "agc_test_net";
    std::filesystem::create_directories(dir);

    const auto trunc = dir / "truncated.json";
    write_text_file(trunc, R"({"format":"net-v1","sizes":[2,)");
    CHECK_THROWS_AS(load_net(trunc), IoError);

    const auto wrong = dir / "wrong_version.json";
    nlohmann::json j = net_to_json(net_init({2, 2}, 0));
    j["format"] = "net-v9";
    save_json_file(wrong, j);
    CHECK_THROWS_WITH(load_net(wrong), Catch::Matchers::ContainsSubstring("net-v9"));

    const auto missing = dir / "nope" / "missing.json";
    CHECK_THROWS_AS(load_net(missing), IoError);
}

TEST_CASE("normalization absorbs constant input shifts") {
    const double delta = 350.0;
    auto build = [&](double shift) {
        Net net = net_init({2, 12, 1}, 8);
        auto rng = make_rng(55);
        Matrix X(80, 2), Y(80, 1);
        for (int i = 0; i < 80; ++i) {
            const double a = rand_uniform(rng, -1, 1), b = rand_uniform(rng, -1, 1);
            X.row(i)[0] = a + shift;
            X.row(i)[1] = b + shift;
            Y.row(i)[0] = a * b;
        }
        TrainOptions opts;
        opts.lr = 0.02;
        opts.epochs = 30;
        opts.seed = 5;
        train_mse(net, X, Y, opts);
        return net;
    };
    const Net plain = build(0.0);
    const Net shifted = build(delta);
    auto rng = make_rng(56);
    for (int i = 0; i < 20; ++i) {
        const double a = rand_uniform(rng, -1, 1), b = rand_uniform(rng, -1, 1);
        const double y0 = forward(plain, {a, b})[0];
        const double y1 = forward(shifted, {a + delta, b + delta})[0];
        CHECK(y0 == Catch::Approx(y1).margin(1e-9));
    }
}

TEST_CASE("mse_loss and validation reporting") {
    Net net = net_init({2, 6, 1}, 2);
    auto rng = make_rng(3);
    Matrix X(50, 2), Y(50, 1), Xv(10, 2), Yv(10, 1);
    auto fill = [&](Matrix& A, Matrix& B) {
        for (int i = 0; i < A.rows; ++i) {
            A.row(i)[0] = rand_uniform(rng, -1, 1);
            A.row(i)[1] = rand_uniform(rng, -1, 1);
            B.row(i)[0] = A.row(i)[0] + A.row(i)[1];
        }
    };
    fill(X, Y);
    fill(Xv, Yv);
    TrainOptions opts;
    opts.epochs = 40;
    opts.lr = 0.05;
    opts.val_inputs = &Xv;
    opts.val_targets = &Yv;
    const TrainReport rep = train_mse(net, X, Y, opts);
    REQUIRE(rep.val_curve.size() == rep.loss_curve.size());
    CHECK(rep.final_val_loss == rep.val_curve.back());
    CHECK(rep.final_val_loss < 0.05);
    CHECK(rep.final_val_loss >= 0.0);
}
