#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infoquant/hedonic.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using iq::DesignMatrix;
using iq::FeatureVector;
using iq::InfoTerm;
using iq::ModelFit;
using iq::ModelSpec;
using iq::SaleRecord;

namespace {

DesignMatrix make_design(const std::vector<std::string>& names,
                         const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& y) {
    DesignMatrix dm;
    dm.names = names;
    dm.X = Eigen::MatrixXd(rows.size(), names.size());
    dm.y = Eigen::VectorXd(y.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) dm.X(i, j) = rows[i][j];
        dm.y(i) = y[i];
    }
    return dm;
}

ModelFit make_fit(const std::vector<std::string>& names, const std::vector<double>& coef,
                  const std::vector<double>& se) {
    ModelFit fit;
    fit.names = names;
    fit.k = static_cast<int>(names.size());
    fit.n = 100;
    fit.coef = Eigen::VectorXd(fit.k);
    fit.robust_se = Eigen::VectorXd(fit.k);
    fit.t_stat = Eigen::VectorXd(fit.k);
    for (int j = 0; j < fit.k; ++j) {
        fit.coef(j) = coef[j];
        fit.robust_se(j) = se[j];
        fit.t_stat(j) = se[j] > 0 ? coef[j] / se[j]
                                  : std::numeric_limits<double>::quiet_NaN();
    }
    fit.residuals = Eigen::VectorXd::Zero(fit.n);
    return fit;
}

SaleRecord make_record(const std::string& id, double price, int year,
                       const std::string& material = "canvas",
                       const std::string& city = "London",
                       const std::string& salesroom = "Christie's") {
    SaleRecord r;
    r.id = id;
    r.price_usd = price;
    r.sale_year = year;
    r.age = 50;
    r.surface = 2.5;
    r.signature = 1;
    r.dated = 0;
    r.material = material;
    r.city = city;
    r.salesroom = salesroom;
    r.image_path = id + ".png";
    return r;
}

FeatureVector make_features(double line, double color, double value, double shape,
                            double space) {
    FeatureVector fv;
    fv.v_line = line;
    fv.v_color = color;
    fv.v_value = value;
    fv.v_shape = shape;
    fv.v_space = space;
    fv.meta.width = 100;
    fv.meta.height = 80;
    fv.meta.config_fingerprint = 0xabcdef;
    return fv;
}

DesignMatrix random_design(testutil::Rng& rng, int n, int k) {
    std::vector<std::string> names{"Constant"};
    for (int j = 1; j < k; ++j) names.push_back("x" + std::to_string(j));
    std::vector<std::vector<double>> rows(n, std::vector<double>(k, 1.0));
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < k; ++j) rows[i][j] = rng.uniform(-3.0, 3.0);
        y[i] = rng.uniform(-5.0, 5.0);
    }
    return make_design(names, rows, y);
}

}  // namespace

TEST_CASE("ols_fit reproduces exact linear data") {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < 5; ++i) {
        rows.push_back({1.0, static_cast<double>(i)});
        y.push_back(3.0 + 2.0 * i);
    }
    const ModelFit fit = iq::ols_fit(make_design({"Constant", "x"}, rows, y));
    CHECK(fit.coef(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.coef(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.robust_se(0) == doctest::Approx(0.0));
    CHECK(fit.robust_se(1) == doctest::Approx(0.0));
}

TEST_CASE("ols_fit matches the hand-solved three-point line") {
    const ModelFit fit = iq::ols_fit(
        make_design({"Constant", "x"}, {{1, 0}, {1, 1}, {1, 2}}, {1, 2, 4}));
    CHECK(fit.coef(1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.coef(0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("duplicated column raises RankDeficiencyError naming it") {
    const DesignMatrix dm = make_design({"Constant", "a", "a_copy"},
                                        {{1, 2, 2}, {1, 3, 3}, {1, 5, 5}, {1, 7, 7}},
                                        {1, 2, 3, 4});
    CHECK_THROWS_WITH_AS(iq::ols_fit(dm), doctest::Contains("a"),
                         iq::RankDeficiencyError);
    try {
        iq::ols_fit(dm);
    } catch (const iq::RankDeficiencyError& e) {
        REQUIRE(e.columns().size() == 1);
        const std::string& name = e.columns()[0];
        CHECK((name == "a" || name == "a_copy"));
    }
}

TEST_CASE("ols_fit refuses n <= k") {
    CHECK_THROWS_AS(
        iq::ols_fit(make_design({"Constant", "x"}, {{1, 2}, {1, 3}}, {1.0, 2.0})),
        iq::DomainError);
}

TEST_CASE("QR coefficients match explicit normal equations on random systems") {
    testutil::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.next_int(5, 12);
        const int k = rng.next_int(2, 4);
        const DesignMatrix dm = random_design(rng, n, k);
        const ModelFit fit = iq::ols_fit(dm);

        oracle::Matrix x(n, std::vector<double>(k));
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) x[i][j] = dm.X(i, j);
            y[i] = dm.y(i);
        }
        const auto expected = oracle::normal_equation_fit(x, y);
        for (int j = 0; j < k; ++j) {
            REQUIRE(testutil::close_rel(fit.coef(j), expected[j], 1e-9));
        }
    }
}

TEST_CASE("residuals are orthogonal to the design") {
    testutil::Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const DesignMatrix dm = random_design(rng, rng.next_int(10, 40), rng.next_int(2, 4));
        const ModelFit fit = iq::ols_fit(dm);
        const Eigen::VectorXd xte = dm.X.transpose() * fit.residuals;
        const double scale = std::max(1.0, (dm.X.transpose() * dm.y).cwiseAbs().maxCoeff());
        REQUIRE(xte.cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
}

TEST_CASE("adjusted R^2 never exceeds R^2 when k > 1") {
    testutil::Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const DesignMatrix dm = random_design(rng, rng.next_int(8, 30), rng.next_int(2, 4));
        const ModelFit fit = iq::ols_fit(dm);
        CHECK(fit.adj_r_squared <= fit.r_squared + 1e-15);
    }
}

TEST_CASE("HC1 matches the dense sandwich oracle") {
    testutil::Rng rng(44);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.next_int(8, 12);
        const int k = rng.next_int(2, 4);
        const DesignMatrix dm = random_design(rng, n, k);
        const ModelFit fit = iq::ols_fit(dm);

        oracle::Matrix x(n, std::vector<double>(k));
        std::vector<double> resid(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) x[i][j] = dm.X(i, j);
            resid[i] = fit.residuals(i);
        }
        const auto expected = oracle::hc1_standard_errors(x, resid);
        for (int j = 0; j < k; ++j) {
            REQUIRE(testutil::close_rel(fit.robust_se(j), expected[j], 1e-10));
        }
    }
}

TEST_CASE("all-zero residuals give all-zero robust SEs") {
    testutil::Rng rng(45);
    const DesignMatrix dm = random_design(rng, 10, 3);
    const Eigen::VectorXd se =
        iq::robust_standard_errors(dm.X, Eigen::VectorXd::Zero(10));
    CHECK(se.maxCoeff() == 0.0);
    CHECK(se.minCoeff() == 0.0);
}

TEST_CASE("HC1 reduces to scaled classical SEs under equal squared residuals") {
    testutil::Rng rng(46);
    const int n = 24, k = 3;
    const DesignMatrix dm = random_design(rng, n, k);
    Eigen::VectorXd resid(n);
    for (int i = 0; i < n; ++i) resid(i) = (i % 2 == 0) ? 0.7 : -0.7;

    const Eigen::VectorXd hc1 = iq::robust_standard_errors(dm.X, resid);
    // Classical: sqrt(RSS/(n-k) * diag((X'X)^-1)); with e_i^2 = a the HC1
    // sandwich collapses to n/(n-k) * a * (X'X)^-1.
    const Eigen::MatrixXd xtx_inv =
        (dm.X.transpose() * dm.X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    const double rss = resid.squaredNorm();
    for (int j = 0; j < k; ++j) {
        const double classical = std::sqrt(rss / (n - k) * xtx_inv(j, j));
        REQUIRE(hc1(j) == doctest::Approx(classical).epsilon(1e-10));
    }
}

TEST_CASE("HC1 approaches classical SEs on homoskedastic data") {
    testutil::Rng rng(47);
    const int n = 4000;
    std::vector<std::vector<double>> rows(n, std::vector<double>(3, 1.0));
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        rows[i][1] = rng.uniform(-2.0, 2.0);
        rows[i][2] = rng.normal();
        y[i] = 1.0 + 0.5 * rows[i][1] - 0.8 * rows[i][2] + rng.normal();
    }
    const DesignMatrix dm = make_design({"Constant", "x1", "x2"}, rows, y);
    const ModelFit fit = iq::ols_fit(dm);

    const Eigen::MatrixXd xtx_inv =
        (dm.X.transpose() * dm.X).ldlt().solve(Eigen::MatrixXd::Identity(3, 3));
    const double s2 = fit.residuals.squaredNorm() / (n - 3);
    for (int j = 0; j < 3; ++j) {
        const double classical = std::sqrt(s2 * xtx_inv(j, j));
        REQUIRE(std::abs(fit.robust_se(j) - classical) <= 0.1 * classical);
    }
}

TEST_CASE("affine changes to a regressor behave as theory says") {
    testutil::Rng rng(48);
    const int n = 30;
    DesignMatrix dm = random_design(rng, n, 3);
    const ModelFit base = iq::ols_fit(dm);

    SUBCASE("adding a constant moves only the intercept") {
        DesignMatrix shifted = dm;
        shifted.X.col(1).array() += 4.25;
        const ModelFit fit = iq::ols_fit(shifted);
        CHECK(fit.coef(1) == doctest::Approx(base.coef(1)).epsilon(1e-9));
        CHECK(fit.coef(2) == doctest::Approx(base.coef(2)).epsilon(1e-9));
        CHECK(fit.coef(0) ==
              doctest::Approx(base.coef(0) - 4.25 * base.coef(1)).epsilon(1e-9));
        CHECK(fit.r_squared == doctest::Approx(base.r_squared).epsilon(1e-9));
    }

    SUBCASE("scaling a regressor scales its coefficient inversely") {
        const double c = 8.0;
        DesignMatrix scaled = dm;
        scaled.X.col(1) *= c;
        const ModelFit fit = iq::ols_fit(scaled);
        CHECK(fit.coef(1) == doctest::Approx(base.coef(1) / c).epsilon(1e-9));
        CHECK(fit.coef(0) == doctest::Approx(base.coef(0)).epsilon(1e-9));
        CHECK(fit.coef(2) == doctest::Approx(base.coef(2)).epsilon(1e-9));
        CHECK(fit.r_squared == doctest::Approx(base.r_squared).epsilon(1e-9));
        // Fitted values identical, t-statistics untouched.
        const Eigen::VectorXd fitted_base = dm.X * base.coef;
        const Eigen::VectorXd fitted = scaled.X * fit.coef;
        REQUIRE((fitted - fitted_base).cwiseAbs().maxCoeff() <= 1e-9);
        for (int j = 0; j < 3; ++j) {
            REQUIRE(fit.t_stat(j) == doctest::Approx(base.t_stat(j)).epsilon(1e-9));
        }
    }
}

TEST_CASE("build_design_matrix applies the scale-then-log rule") {
    std::vector<SaleRecord> records{make_record("A", 1000.0, 2001)};
    std::vector<FeatureVector> features{make_features(0.093, 0.2, 0.2, 0.01, 0.06)};
    ModelSpec spec;
    spec.information_terms = {InfoTerm::line, InfoTerm::color, InfoTerm::value,
                              InfoTerm::shape, InfoTerm::space};
    spec.line_quadratic = true;

    // Single record: years collapse to the base, dummies for its own levels.
    const DesignMatrix dm = iq::build_design_matrix(records, features, spec);
    const auto col = [&](const std::string& name) {
        auto it = std::find(dm.names.begin(), dm.names.end(), name);
        REQUIRE(it != dm.names.end());
        return dm.X(0, it - dm.names.begin());
    };
    CHECK(col("log(V_line)") == doctest::Approx(std::log(93.0)).epsilon(1e-12));
    CHECK(col("log(V_line)") == doctest::Approx(4.5326).epsilon(1e-4));
    CHECK(col("log2(V_line)") ==
          doctest::Approx(std::log(93.0) * std::log(93.0)).epsilon(1e-12));
    CHECK(col("Constant") == 1.0);
    CHECK(col("Surface") == doctest::Approx(2.5));
    CHECK(col("Surface2") == doctest::Approx(6.25));
    CHECK(dm.y(0) == doctest::Approx(std::log(1000.0)).epsilon(1e-12));
}

TEST_CASE("base-category records emit all-zero dummy columns") {
    std::vector<SaleRecord> records{
        make_record("A", 100.0, 2000, "Others", "Others", "Others"),
        make_record("B", 200.0, 2001, "canvas", "London", "Christie's"),
        make_record("C", 300.0, 2001, "board", "Paris", "Sotheby's"),
    };
    std::vector<FeatureVector> features(3, make_features(0.1, 0.2, 0.2, 0.01, 0.05));
    const DesignMatrix dm = iq::build_design_matrix(records, features, ModelSpec{});

    for (std::size_t j = 0; j < dm.names.size(); ++j) {
        const std::string& name = dm.names[j];
        if (name.find(':') != std::string::npos) {
            CHECK(dm.X(0, j) == 0.0);  // record A sits at every base level
        }
        CHECK(name.find("Others") == std::string::npos);
        CHECK(name != "year:2000");  // first year is the base
    }
    // Declared levels absent from the data contribute no column.
    CHECK(std::find(dm.names.begin(), dm.names.end(), "material:ceramic") == dm.names.end());
    CHECK(std::find(dm.names.begin(), dm.names.end(), "year:2001") != dm.names.end());
}

TEST_CASE("build_design_matrix rejects bad inputs") {
    std::vector<SaleRecord> records{make_record("A", 100.0, 2000),
                                    make_record("B", 50.0, 2001)};
    std::vector<FeatureVector> features(2, make_features(0.1, 0.2, 0.2, 0.01, 0.05));

    SUBCASE("length mismatch") {
        features.pop_back();
        CHECK_THROWS_AS(iq::build_design_matrix(records, features, ModelSpec{}),
                        iq::AlignmentError);
    }
    SUBCASE("zero measure with the term selected") {
        features[1].v_color = 0.0;
        ModelSpec spec;
        spec.information_terms = {InfoTerm::color};
        CHECK_THROWS_AS(iq::build_design_matrix(records, features, spec), iq::DomainError);
    }
    SUBCASE("zero measure with the term not selected is fine") {
        features[1].v_color = 0.0;
        ModelSpec spec;
        spec.information_terms = {InfoTerm::value};
        CHECK_NOTHROW(iq::build_design_matrix(records, features, spec));
    }
    SUBCASE("non-positive price") {
        records[0].price_usd = 0.0;
        CHECK_THROWS_AS(iq::build_design_matrix(records, features, ModelSpec{}),
                        iq::DomainError);
    }
    SUBCASE("undeclared categorical level") {
        records[1].material = "vellum";
        CHECK_THROWS_AS(iq::build_design_matrix(records, features, ModelSpec{}),
                        iq::UnknownLevelError);
    }
    SUBCASE("mixed extraction configs") {
        features[1].meta.config_fingerprint = 0x1234;
        CHECK_THROWS_AS(iq::build_design_matrix(records, features, ModelSpec{}),
                        iq::ConfigMismatchError);
    }
}

TEST_CASE("duplicated dummy level produces collinear columns that the fit names") {
    std::vector<SaleRecord> records;
    std::vector<FeatureVector> features;
    testutil::Rng rng(49);
    for (int i = 0; i < 40; ++i) {
        SaleRecord r = make_record("R" + std::to_string(i), 100.0 + i, 2000 + (i % 3),
                                   i % 2 ? "canvas" : "Others");
        r.surface = rng.uniform(0.5, 9.0);
        r.age = rng.uniform(40, 120);
        records.push_back(r);
        features.push_back(make_features(0.05 + 0.001 * i, 0.2, 0.2, 0.01, 0.05));
    }
    ModelSpec spec;
    spec.material.levels = {"canvas", "canvas", "Others"};  // declared twice
    try {
        iq::ols_fit(iq::build_design_matrix(records, features, spec));
        FAIL("expected RankDeficiencyError");
    } catch (const iq::RankDeficiencyError& e) {
        REQUIRE_FALSE(e.columns().empty());
        CHECK(e.columns()[0] == "material:canvas");
    }
}

TEST_CASE("predict_log_price computes the named inner product") {
    const ModelFit fit = make_fit({"Constant", "log(V_color)"}, {2.5, 0.3}, {0.1, 0.05});

    std::map<std::string, double> intercept_only{{"Constant", 1.0}, {"log(V_color)", 0.0}};
    CHECK(iq::predict_log_price(fit, intercept_only) == 2.5);
    CHECK(iq::predict_log_price(fit, intercept_only) ==
          iq::predict_log_price(fit, intercept_only));

    std::map<std::string, double> row{{"Constant", 1.0}, {"log(V_color)", 2.0}};
    CHECK(iq::predict_log_price(fit, row) == doctest::Approx(3.1).epsilon(1e-12));

    std::map<std::string, double> missing{{"Constant", 1.0}};
    CHECK_THROWS_AS(iq::predict_log_price(fit, missing), iq::SchemaError);
    std::map<std::string, double> wrong{{"Constant", 1.0}, {"bogus", 2.0}};
    CHECK_THROWS_AS(iq::predict_log_price(fit, wrong), iq::SchemaError);
}

TEST_CASE("fitted values equal y minus residuals through predict_log_price") {
    testutil::Rng rng(50);
    const DesignMatrix dm = random_design(rng, 12, 3);
    const ModelFit fit = iq::ols_fit(dm);
    for (int i = 0; i < 4; ++i) {
        std::map<std::string, double> row;
        for (int j = 0; j < dm.k(); ++j) row[dm.names[j]] = dm.X(i, j);
        const double fitted = iq::predict_log_price(fit, row);
        CHECK(fitted == doctest::Approx(dm.y(i) - fit.residuals(i)).epsilon(1e-9));
    }
}

TEST_CASE("price_ratio contrasts only the information terms") {
    ModelFit fit = make_fit({"Constant", "log(V_color)", "Surface"}, {1.0, 0.306, 0.1},
                            {0.1, 0.08, 0.01});
    const FeatureVector a = make_features(0.1, 0.4, 0.2, 0.01, 0.05);
    const FeatureVector b = make_features(0.1, 0.2, 0.2, 0.01, 0.05);

    SUBCASE("identical vectors give exactly 1") {
        CHECK(iq::price_ratio(fit, a, a) == 1.0);
    }
    SUBCASE("single-term contrast matches the closed form") {
        const double ratio = iq::price_ratio(fit, a, b);
        CHECK(ratio == doctest::Approx(std::exp(0.306 * std::log(2.0))).epsilon(1e-12));
        CHECK(ratio == doctest::Approx(1.236).epsilon(1e-3));
    }
    SUBCASE("reciprocal pairs multiply to 1") {
        testutil::Rng rng(51);
        for (int trial = 0; trial < 20; ++trial) {
            const FeatureVector u = make_features(rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.4),
                                                  rng.uniform(0.01, 0.4), rng.uniform(0.001, 1.0),
                                                  rng.uniform(0.01, 0.1));
            const FeatureVector w = make_features(rng.uniform(0.01, 0.2), rng.uniform(0.01, 0.4),
                                                  rng.uniform(0.01, 0.4), rng.uniform(0.001, 1.0),
                                                  rng.uniform(0.01, 0.1));
            const double forward = iq::price_ratio(fit, u, w);
            const double backward = iq::price_ratio(fit, w, u);
            REQUIRE(std::abs(forward * backward - 1.0) <= 1e-12);
        }
    }
    SUBCASE("mismatched resolution metadata is rejected") {
        FeatureVector c = b;
        c.meta.width = 99;
        CHECK_THROWS_AS(iq::price_ratio(fit, a, c), iq::ConfigMismatchError);
    }
    SUBCASE("mismatched config fingerprints are rejected") {
        FeatureVector c = b;
        c.meta.config_fingerprint = 0x77;
        CHECK_THROWS_AS(iq::price_ratio(fit, a, c), iq::ConfigMismatchError);
    }
    SUBCASE("shared attributes cancel and unknown ones are rejected") {
        CHECK(iq::price_ratio(fit, a, b, {{"Surface", 3.0}}) ==
              doctest::Approx(iq::price_ratio(fit, a, b)).epsilon(1e-15));
        CHECK_THROWS_AS(iq::price_ratio(fit, a, b, {{"bogus", 1.0}}), iq::SchemaError);
        CHECK_THROWS_AS(iq::price_ratio(fit, a, b, {{"log(V_color)", 1.0}}),
                        iq::SchemaError);
    }
    SUBCASE("quadratic line term contributes its squared-log contrast") {
        ModelFit quad = make_fit({"Constant", "log(V_line)", "log2(V_line)"},
                                 {0.0, 24.23, -2.728}, {1.0, 6.6, 0.7});
        FeatureVector u = make_features(0.08, 0.2, 0.2, 0.01, 0.05);
        FeatureVector w = make_features(0.05, 0.2, 0.2, 0.01, 0.05);
        const double lu = std::log(1000 * 0.08);
        const double lw = std::log(1000 * 0.05);
        const double expected =
            std::exp(24.23 * (lu - lw) + -2.728 * (lu * lu - lw * lw));
        CHECK(iq::price_ratio(quad, u, w) == doctest::Approx(expected).epsilon(1e-12));
        const iq::RatioReport report = iq::price_ratio_report(quad, u, w);
        REQUIRE(report.terms.size() == 2);
        CHECK(report.terms[0].column == "log(V_line)");
        CHECK(report.terms[1].column == "log2(V_line)");
    }
}

TEST_CASE("significance stars follow the published convention") {
    CHECK(iq::significance_stars(0.925 / 0.329) == "***");  // t = 2.81
    CHECK(iq::significance_stars(0.242 / 0.120) == "**");   // t = 2.02
    CHECK(iq::significance_stars(1.70) == "*");
    CHECK(iq::significance_stars(0.0) == "");
    CHECK(iq::significance_stars(-3.5) == "***");
    CHECK(iq::significance_stars(std::numeric_limits<double>::quiet_NaN()) == "");
    // Boundaries: normal two-sided critical values.
    CHECK(iq::significance_stars(2.58) == "***");
    CHECK(iq::significance_stars(2.57) == "**");
    CHECK(iq::significance_stars(1.96) == "**");
    CHECK(iq::significance_stars(1.95) == "*");
    CHECK(iq::significance_stars(1.65) == "*");
    CHECK(iq::significance_stars(1.64) == "");
}

TEST_CASE("hypothesis_report summarizes the five information terms") {
    const std::vector<std::string> names{
        "Constant",     "log(V_line)",  "log2(V_line)", "log(V_color)",
        "log(V_value)", "log(V_shape)", "log(V_space)"};
    const ModelFit fit = make_fit(
        names, {1.0, 24.23, -2.728, 0.306, 0.459, 0.242, 0.925},
        {0.5, 6.647, 0.738, 0.0827, 0.172, 0.120, 0.329});
    const iq::HypothesisReport report = iq::hypothesis_report(fit);
    REQUIRE(report.rows.size() == 6);

    CHECK(report.rows[0].column == "log(V_line)");
    CHECK(report.rows[0].stars == "***");
    CHECK(report.rows[0].sign_matches);

    CHECK(report.rows[1].column == "log2(V_line)");
    CHECK(report.rows[1].expected_sign == -1);
    CHECK(report.rows[1].sign_matches);

    const auto& shape = report.rows[4];
    CHECK(shape.column == "log(V_shape)");
    CHECK(shape.t == doctest::Approx(2.0167).epsilon(1e-3));
    CHECK(shape.stars == "**");

    const auto& space = report.rows[5];
    CHECK(space.t == doctest::Approx(2.8116).epsilon(1e-3));
    CHECK(space.stars == "***");

    const std::string text = report.render();
    CHECK(text.find("log(V_space)") != std::string::npos);
}

TEST_CASE("hypothesis_report requires all five terms") {
    const ModelFit partial =
        make_fit({"Constant", "log(V_line)", "log(V_color)"}, {1, 2, 3}, {1, 1, 1});
    CHECK_THROWS_AS(iq::hypothesis_report(partial), iq::MissingTermError);
}

TEST_CASE("a zero coefficient earns no stars in the report") {
    const std::vector<std::string> names{
        "Constant",     "log(V_line)",  "log(V_color)",
        "log(V_value)", "log(V_shape)", "log(V_space)"};
    const ModelFit fit =
        make_fit(names, {1.0, 0.0, 0.3, 0.3, 0.3, 0.3}, {0.5, 0.2, 0.1, 0.1, 0.1, 0.1});
    const iq::HypothesisReport report = iq::hypothesis_report(fit);
    CHECK(report.rows[0].stars == "");
    CHECK_FALSE(report.rows[0].sign_matches);
}

TEST_CASE("model JSON round-trips the fit") {
    const std::vector<std::string> names{"Constant", "log(V_line)", "Surface"};
    ModelFit fit = make_fit(names, {1.5, 24.23, 0.107}, {0.5, 6.647, 0.0119});
    fit.r_squared = 0.52;
    fit.adj_r_squared = 0.51;
    fit.spec_fingerprint = 0xdeadbeef;
    fit.feature_fingerprint = 0xfeed;

    const ModelFit back = iq::fit_from_json(iq::fit_json(fit));
    CHECK(back.names == fit.names);
    for (int j = 0; j < fit.k; ++j) {
        CHECK(back.coef(j) == fit.coef(j));
        CHECK(back.robust_se(j) == fit.robust_se(j));
    }
    CHECK(back.adj_r_squared == fit.adj_r_squared);
    CHECK(back.spec_fingerprint == fit.spec_fingerprint);
    CHECK(back.feature_fingerprint == fit.feature_fingerprint);
    CHECK(back.n == fit.n);
}

TEST_CASE("rendered table carries the published row structure") {
    std::vector<SaleRecord> records;
    std::vector<FeatureVector> features;
    testutil::Rng rng(52);
    const char* materials[] = {"canvas", "board", "Others"};
    const char* cities[] = {"London", "New York", "Others"};
    const char* rooms[] = {"Christie's", "Sotheby's", "Others"};
    for (int i = 0; i < 60; ++i) {
        SaleRecord r = make_record("R" + std::to_string(i), 50.0 + rng.uniform(1, 9000),
                                   2000 + (i % 5), materials[rng.next_int(0, 2)],
                                   cities[rng.next_int(0, 2)], rooms[rng.next_int(0, 2)]);
        r.surface = rng.uniform(0.5, 12.0);
        r.age = rng.uniform(40, 120);
        r.signature = i % 2;
        r.dated = (i / 2) % 2;
        records.push_back(r);
        features.push_back(make_features(rng.uniform(0.02, 0.2), rng.uniform(0.05, 0.4),
                                         rng.uniform(0.05, 0.4), rng.uniform(0.002, 0.9),
                                         rng.uniform(0.01, 0.1)));
    }
    ModelSpec spec;
    spec.information_terms = {InfoTerm::line, InfoTerm::color, InfoTerm::value,
                              InfoTerm::shape, InfoTerm::space};
    spec.line_quadratic = true;
    const ModelFit fit = iq::ols_fit(iq::build_design_matrix(records, features, spec));
    const std::string table = iq::render_table(fit);

    const char* expected_rows[] = {
        "log(V_line)", "log2(V_line)", "log(V_color)",  "log(V_value)", "log(V_shape)",
        "log(V_space)", "Surface",     "Surface^2",     "Age",          "Signature",
        "Dated",        "Material",    "City",          "Salesroom",    "Saleyear",
        "Constant",     "Observations", "Adj-R-squared"};
    std::size_t cursor = 0;
    for (const char* row : expected_rows) {
        const std::size_t pos = table.find(row, cursor);
        REQUIRE_MESSAGE(pos != std::string::npos, row);
        cursor = pos;
    }
    CHECK(table.find("*** p<0.01, ** p<0.05, * p<0.1") != std::string::npos);
    CHECK(table.find("Robust standard errors in parentheses") != std::string::npos);
}
