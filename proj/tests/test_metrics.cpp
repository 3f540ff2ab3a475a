#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "agc/metrics.hpp"
#include "agc/world.hpp"
#include "test_oracles.hpp"

using namespace agc;

TEST_CASE("cumulative_abs_error: examples and monotonicity") {
    CHECK(cumulative_abs_error({1, 2, 3}, {1, 2, 3}) == std::vector<double>{0, 0, 0});
    CHECK(cumulative_abs_error({2, 3, 4}, {1, 2, 3}) == std::vector<double>{1, 2, 3});

    auto rng = make_rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(50), b(50);
        for (int i = 0; i < 50; ++i) {
            a[i] = rand_uniform(rng, -5, 5);
            b[i] = rand_uniform(rng, -5, 5);
        }
        const auto e = cumulative_abs_error(a, b);
        for (size_t i = 1; i < e.size(); ++i) CHECK(e[i] >= e[i - 1]);
    }

    CHECK_THROWS_AS(cumulative_abs_error({1, 2}, {1, 2, 3}), ValidationError);
}

TEST_CASE("welch_t_test: identical samples") {
    const std::vector<double> a{1, 2, 3, 4};
    const TTestResult r = welch_t_test(a, a);
    CHECK(r.t == Catch::Approx(0.0));
    CHECK(r.p == Catch::Approx(1.0));
    CHECK_FALSE(r.significant);
}

TEST_CASE("welch_t_test: textbook example t = -1, df = 8, p = 0.347") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 3, 4, 5, 6};
    const TTestResult r = welch_t_test(a, b);
    CHECK(r.t == Catch::Approx(-1.0).margin(1e-12));
    CHECK(r.df == Catch::Approx(8.0).margin(1e-12));
    CHECK(r.p == Catch::Approx(0.3466).margin(1e-2));
    CHECK_FALSE(r.significant);

    // pooled variant coincides here (equal variances, equal sizes)
    const TTestResult rp = welch_t_test(a, b, true);
    CHECK(rp.t == Catch::Approx(r.t));
    CHECK(rp.df == Catch::Approx(8.0));
}

TEST_CASE("welch_t_test: well-separated samples are significant") {
    std::vector<double> a, b;
    auto rng = make_rng(7);
    for (int i = 0; i < 7; ++i) {
        a.push_back(0.0 + rand_normal(rng));
        b.push_back(10.0 + rand_normal(rng));
    }
    const TTestResult r = welch_t_test(a, b);
    CHECK(r.p < 0.01);
    CHECK(r.significant);
}

TEST_CASE("welch_t_test: degenerate variance conventions and validation") {
    const std::vector<double> flat{2, 2, 2};
    const TTestResult same = welch_t_test(flat, flat);
    CHECK(same.p == 1.0);
    const TTestResult diff = welch_t_test(flat, {3, 3, 3});
    CHECK(diff.p == 0.0);
    CHECK(diff.significant);

    CHECK_THROWS_AS(welch_t_test({1.0}, {1, 2, 3}), ValidationError);
    CHECK_THROWS_AS(welch_t_test({}, {}), ValidationError);
}

TEST_CASE("welch_t_test agrees with a permutation oracle on random small samples") {
    auto rng = make_rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const int na = 10 + static_cast<int>(rand_uniform(rng, 0, 5));
        const int nb = 10 + static_cast<int>(rand_uniform(rng, 0, 5));
        std::vector<double> a, b;
        const double shift = rand_uniform(rng, 0.0, 1.5);
        for (int i = 0; i < na; ++i) a.push_back(rand_normal(rng));
        for (int i = 0; i < nb; ++i) b.push_back(shift + rand_normal(rng));
        const double p_welch = welch_t_test(a, b).p;
        const double p_perm = agc_test::permutation_p(a, b, 40000, 1000 + trial);
        CHECK(std::abs(p_welch - p_perm) <= 0.02);
    }
}

TEST_CASE("build_econ_table mirrors the per-greenhouse comparison layout") {
    WorldParams p;
    EconConfig econ;
    ActionBounds bounds;
    // long enough for harvestable fruit, so the gains rows carry real values
    const Dataset control =
        generate_dataset(3, 14, random_strategy_sampler(bounds), 1, p, econ, bounds);
    // a cheaper strategy group: everything at the lower bound
    Dataset experiment;
    for (int i = 0; i < 3; ++i) {
        const WeatherSeries ws = generate_weather(14, 50 + i, "temperate-spring");
        experiment.episodes.push_back(world_rollout(
            [&](const State&, int) {
                return Action{bounds.temp_lo, bounds.co2_lo, bounds.light_lo, bounds.irr_lo};
            },
            ws, p, econ, bounds));
    }

    const auto rows = build_econ_table(control.episodes, experiment.episodes,
                                       econ.greenhouse_area);
    REQUIRE(rows.size() == 9);
    CHECK(rows.front().label == "Energy Cost (EUR)");
    CHECK(rows.back().label == "Net Profit (EUR)");

    // depreciation is constant in both groups: no spread, no t-test
    const auto& dep = rows[4];
    CHECK(dep.label == "Equipment Depreciation (EUR)");
    CHECK_FALSE(dep.has_p);
    CHECK(dep.has_ri);
    CHECK(dep.rel_improvement == Catch::Approx(0.0));

    // the minimal group spends less energy: positive improvement on a cost row
    CHECK(rows[0].rel_improvement > 0.0);
    // relative improvement of a benefit row: (exp - ctrl) / |ctrl|
    const auto& gains = rows[7];
    REQUIRE(gains.has_ri);
    CHECK(gains.control.mean > 0.0);
    CHECK(gains.rel_improvement ==
          Catch::Approx((gains.experiment.mean - gains.control.mean) /
                        std::abs(gains.control.mean)));

    CHECK_THROWS_AS(build_econ_table({}, experiment.episodes, 667.0), ValidationError);
}

TEST_CASE("replay_trajectory reproduces world ledgers bitwise and flags tampering") {
    WorldParams p;
    EconConfig econ;
    ActionBounds bounds;
    const Dataset ds = generate_dataset(2, 3, random_strategy_sampler(bounds), 9, p, econ,
                                        bounds);
    for (const auto& ep : ds.episodes) {
        const ReplayCheck chk = replay_trajectory(ep);
        CHECK(chk.ok);
        CHECK(chk.detail.empty());
    }

    Trajectory tampered = ds.episodes[0];
    tampered.ledger.gains += 1e-9;
    CHECK_FALSE(replay_trajectory(tampered).ok);

    Trajectory no_econ = ds.episodes[0];
    no_econ.meta.erase("econ");
    CHECK_THROWS_AS(replay_trajectory(no_econ), ValidationError);
}

TEST_CASE("r2 csv round-trips") {
    R2Table t;
    t.rows.push_back({"AirT", 0.987654, 0.987654, true, 120});
    t.rows.push_back({"FW", -0.25, 0.0, true, 5});
    const auto path = std::filesystem::temp_directory_path() / "agc_test_r2.csv";
    write_r2_csv(t, path);
    const R2Table back = read_r2_csv(path);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].variable == "AirT");
    CHECK(back.rows[0].r2_clamped == Catch::Approx(0.987654).margin(1e-6));
    CHECK(back.rows[1].r2_raw == Catch::Approx(-0.25).margin(1e-6));
}

TEST_CASE("render_report writes the full bundle and validates inputs") {
    MetricsReport m;
    const auto out = std::filesystem::temp_directory_path() / "agc_test_report";
    std::filesystem::remove_all(out);

    CHECK_THROWS_WITH(render_report(m, out),
                      Catch::Matchers::ContainsSubstring("missing fields"));

    WorldParams p;
    EconConfig econ;
    ActionBounds bounds;
    const Dataset ds =
        generate_dataset(4, 2, random_strategy_sampler(bounds), 3, p, econ, bounds);
    m.truth_net_profit = net_profit_curve(ds.episodes[0]);
    m.sim_net_profit = net_profit_curve(ds.episodes[1]);
    m.cum_abs_error = cumulative_abs_error(m.sim_net_profit, m.truth_net_profit);
    m.econ = build_econ_table({ds.episodes[0], ds.episodes[1]},
                              {ds.episodes[2], ds.episodes[3]}, econ.greenhouse_area);
    m.r2.rows.push_back({"AirT", 0.99, 0.99, true, 100});
    render_report(m, out);

    for (const char* f : {"r2.csv", "econ_table.csv", "econ_table.md", "net_profit.csv",
                          "net_profit.svg", "cum_abs_error.csv", "cum_abs_error.svg"})
        CHECK(std::filesystem::exists(out / f));

    // the SVG is well-formed enough to be XML: one root element, balanced tags
    const std::string svg = read_text_file(out / "net_profit.svg");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);

    const std::string md = read_text_file(out / "econ_table.md");
    CHECK(md.find("| Net Profit (EUR) |") != std::string::npos);
    CHECK(md.find("RI") != std::string::npos);
}

TEST_CASE("svg_line_chart rejects empty series") {
    std::vector<double> empty;
    CHECK_THROWS_AS(svg_line_chart("x", {{"a", &empty}}), ValidationError);
}
